"""Bit-accurate logic simulation and equivalence/corruption measurement.

Patterns are packed bit-parallel into Python ints: the value of a net is an
integer whose bit p is the net's value under pattern p. Exhaustive runs use
the standard truth-table input masks so all 2^|PI| patterns evaluate in one
sweep.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .netlist import GateKind, Netlist, NetlistError, topo_order

EXHAUSTIVE_PI_LIMIT = 20


class PortMismatchError(NetlistError):
    """Netlists under comparison do not share port lists."""


@dataclass(frozen=True)
class Assignment:
    pi_bits: tuple[int, ...]
    key_bits: tuple[int, ...] = ()


@dataclass(frozen=True)
class EquivReport:
    patterns_applied: int
    mismatched_patterns: int
    hamming_histogram: dict[int, int]
    exhaustive: bool

    @property
    def equivalent(self) -> bool:
        return self.mismatched_patterns == 0


def variable_mask(pos: int, n_vars: int) -> int:
    """Truth-table mask for variable `pos`: bit p is (p >> pos) & 1."""
    half = 1 << pos
    block = ((1 << half) - 1) << half
    width = half << 1
    total = 1 << n_vars
    while width < total:
        block |= block << width
        width <<= 1
    return block


def _eval_gate(kind: GateKind, words: list[int], mask: int) -> int:
    if kind is GateKind.AND or kind is GateKind.NAND:
        v = words[0]
        for w in words[1:]:
            v &= w
        return v if kind is GateKind.AND else mask & ~v
    if kind is GateKind.OR or kind is GateKind.NOR:
        v = words[0]
        for w in words[1:]:
            v |= w
        return v if kind is GateKind.OR else mask & ~v
    if kind is GateKind.XOR or kind is GateKind.XNOR:
        v = words[0]
        for w in words[1:]:
            v ^= w
        return v if kind is GateKind.XOR else mask & ~v
    if kind is GateKind.NOT:
        return mask & ~words[0]
    return words[0]  # BUF


def simulate_words(n: Netlist, pi_words: list[int], key_words: list[int], width: int) -> list[int]:
    """Evaluate all primary outputs over `width` packed patterns."""
    if len(pi_words) != len(n.primary_inputs) or len(key_words) != len(n.key_inputs):
        raise NetlistError("assignment length does not match port counts")
    mask = (1 << width) - 1
    values: list[int] = [0] * len(n.nets)
    for net_id, w in zip(n.primary_inputs, pi_words):
        values[net_id] = w & mask
    for net_id, w in zip(n.key_inputs, key_words):
        values[net_id] = w & mask
    for gid in topo_order(n).order:
        g = n.gates[gid]
        values[g.output] = _eval_gate(g.kind, [values[i] for i in g.inputs], mask)
    return [values[o] for o in n.primary_outputs]


def simulate(n: Netlist, a: Assignment) -> tuple[int, ...]:
    """Single-pattern simulation; returns one bit per primary output."""
    outs = simulate_words(n, list(a.pi_bits), list(a.key_bits), 1)
    return tuple(outs)


def exhaustive_pi_words(n_pi: int) -> list[int]:
    return [variable_mask(i, n_pi) for i in range(n_pi)]


def sampled_pi_words(n_pi: int, count: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(count) for _ in range(n_pi)]


def constant_words(bits: tuple[int, ...] | list[int], width: int) -> list[int]:
    mask = (1 << width) - 1
    return [mask if b else 0 for b in bits]


def hamming_per_pattern(diff_words: list[int], width: int) -> np.ndarray:
    """Per-pattern Hamming distance from per-output XOR words."""
    dist = np.zeros(width, dtype=np.int64)
    nbytes = (width + 7) // 8
    for w in diff_words:
        if w == 0:
            continue
        raw = np.frombuffer(w.to_bytes(nbytes, "little"), dtype=np.uint8)
        dist += np.unpackbits(raw, bitorder="little", count=width).astype(np.int64)
    return dist


def equivalence_check(
    golden: Netlist,
    dut: Netlist,
    key: tuple[int, ...] | list[int] = (),
    mode: str = "exhaustive",
    patterns: int = 1000,
    seed: int = 0,
) -> EquivReport:
    """Compare dut (with `key` applied) against golden over input patterns.

    mode 'exhaustive' enumerates all 2^|PI| patterns (|PI| <= 20);
    mode 'sampled' draws `patterns` seeded-uniform patterns.
    """
    if golden.pi_names() != dut.pi_names():
        raise PortMismatchError("primary input ports differ")
    if golden.po_names() != dut.po_names():
        raise PortMismatchError("primary output ports differ")
    if len(key) != dut.key_size:
        raise NetlistError(f"key length {len(key)} != key size {dut.key_size}")
    n_pi = len(golden.primary_inputs)
    if mode == "exhaustive":
        if n_pi > EXHAUSTIVE_PI_LIMIT:
            raise NetlistError(f"exhaustive mode limited to {EXHAUSTIVE_PI_LIMIT} primary inputs")
        width = 1 << n_pi
        pi_words = exhaustive_pi_words(n_pi)
    elif mode == "sampled":
        width = patterns
        pi_words = sampled_pi_words(n_pi, patterns, seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if golden.key_inputs:
        raise PortMismatchError("golden netlist must not have key inputs")
    golden_out = simulate_words(golden, pi_words, [], width)
    dut_out = simulate_words(dut, pi_words, constant_words(tuple(key), width), width)
    diffs = [g ^ d for g, d in zip(golden_out, dut_out)]
    any_diff = 0
    for d in diffs:
        any_diff |= d
    mismatched = bin(any_diff).count("1")
    if mismatched:
        dist = hamming_per_pattern(diffs, width)
        values, counts = np.unique(dist, return_counts=True)
        histogram = {int(v): int(c) for v, c in zip(values, counts)}
    else:
        histogram = {0: width}
    return EquivReport(
        patterns_applied=width,
        mismatched_patterns=mismatched,
        hamming_histogram=histogram,
        exhaustive=(mode == "exhaustive"),
    )
