"""Obfuscation quality indexes: scatter, coverage, formality, and their mean."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

import numpy as np

from .netlist import Netlist, NetlistError, fanout_cone
from .simulate import (
    PortMismatchError,
    constant_words,
    exhaustive_pi_words,
    hamming_per_pattern,
    sampled_pi_words,
    simulate_words,
)

FORMALITY_EXHAUSTIVE_PI_LIMIT = 16


@dataclass(frozen=True)
class MetricsReport:
    t_index: float
    c_index: float
    f_index: float
    composite: float
    max_depth: int
    p_total: int
    exhaustive: bool
    key_entry_nodes: tuple[int, ...]
    covered_gates: int
    gates_total: int
    wrong_keys_used: int
    seed: int

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "metrics_report",
            "t_index": round(self.t_index, 4),
            "c_index": round(self.c_index, 4),
            "f_index": round(self.f_index, 4),
            "composite": round(self.composite, 4),
            "max_depth": self.max_depth,
            "p_total": self.p_total,
            "exhaustive": self.exhaustive,
            "key_entry_nodes": list(self.key_entry_nodes),
            "covered_gates": self.covered_gates,
            "gates_total": self.gates_total,
            "wrong_keys_used": self.wrong_keys_used,
            "seed": self.seed,
        }


def key_entry_nodes(n: Netlist) -> list[int]:
    """Gates with at least one key-input net among their inputs, ascending id."""
    if not n.key_inputs:
        raise NetlistError("netlist has no key inputs")
    key_nets = set(n.key_inputs)
    found = {g.id for g in n.gates if key_nets & set(g.inputs)}
    return sorted(found)


def default_max_depth(n: Netlist) -> int:
    """Published rule: total gates over key size, clamped to at least 1."""
    return max(1, n.gate_count // max(1, n.key_size))


def scatter_index(n: Netlist, max_depth: int) -> float:
    """Share of gates within `max_depth` undirected hops of a key-entry gate.

    Hop distance runs through nets in both driver-to-sink directions; the
    entry gates themselves sit at distance zero.
    """
    entries = key_entry_nodes(n)
    dist = {gid: 0 for gid in entries}
    q = deque(entries)
    while q:
        gid = q.popleft()
        d = dist[gid]
        g = n.gates[gid]
        neighbors = list(n.nets[g.output].sinks)
        for i in g.inputs:
            drv = n.nets[i].driver
            if drv is not None:
                neighbors.append(drv)
        for u in neighbors:
            if u not in dist:
                dist[u] = d + 1
                q.append(u)
    score = sum(1 for gid, d in dist.items() if d <= max_depth)
    return 100.0 * score / n.gate_count


def coverage_index(n: Netlist, union: bool = True) -> tuple[float, int]:
    """Share of gates inside key-entry fan-out cones (entry gates included).

    union=False keeps the literal per-entry summation, which double-counts
    overlapping cones and may exceed 100.
    """
    entries = key_entry_nodes(n)
    if union:
        covered: set[int] = set()
        for gid in entries:
            covered.add(gid)
            covered |= fanout_cone(n, n.gates[gid].output)
        count = len(covered)
    else:
        count = sum(1 + len(fanout_cone(n, n.gates[gid].output)) for gid in entries)
    return 100.0 * count / n.gate_count, count


def sample_wrong_keys(k_size: int, correct: tuple[int, ...] | None,
                      count: int, seed: int) -> list[tuple[int, ...]]:
    """Seeded-uniform key values; excludes `correct` when it is known.

    Values repeat only when the wrong-key space is smaller than `count`.
    """
    if k_size < 1:
        raise ValueError("netlist has no key inputs")
    rng = random.Random(seed)
    correct_val = None if correct is None else sum(b << i for i, b in enumerate(correct))
    wrong_space = (1 << k_size) - (0 if correct_val is None else 1)
    if wrong_space < 1:
        raise ValueError("no wrong key exists")
    dedupe = wrong_space > count
    out: list[tuple[int, ...]] = []
    seen: set[int] = set()
    while len(out) < count:
        v = rng.getrandbits(k_size)
        if v == correct_val or (dedupe and v in seen):
            continue
        seen.add(v)
        out.append(tuple((v >> i) & 1 for i in range(k_size)))
    return out


def formality_index(
    golden: Netlist,
    locked: Netlist,
    keys: list[tuple[int, ...]],
    p_total: int = 1000,
    seed: int = 0,
) -> tuple[float, int, bool]:
    """Corruption score over applied patterns, averaged over the given keys.

    Per pattern the matching rate is (O_size - Hamming)/O_size and the
    contribution is 1 - |2*rate - 1|, peaking when half the output bits
    disagree. Exhaustive below 17 primary inputs, sampled otherwise.
    Returns (f_index, patterns_used, exhaustive?).
    """
    if golden.pi_names() != locked.pi_names():
        raise PortMismatchError("primary input ports differ")
    if golden.po_names() != locked.po_names():
        raise PortMismatchError("primary output ports differ")
    if golden.key_inputs:
        raise PortMismatchError("golden netlist must not have key inputs")
    if not keys:
        raise ValueError("need at least one key to evaluate")
    n_pi = len(golden.primary_inputs)
    o_size = len(golden.primary_outputs)
    if n_pi <= FORMALITY_EXHAUSTIVE_PI_LIMIT:
        width = 1 << n_pi
        pi_words = exhaustive_pi_words(n_pi)
        exhaustive = True
    else:
        width = p_total
        pi_words = sampled_pi_words(n_pi, p_total, seed)
        exhaustive = False
    golden_out = simulate_words(golden, pi_words, [], width)
    total = 0.0
    for key in keys:
        locked_out = simulate_words(locked, pi_words, constant_words(key, width), width)
        diffs = [g ^ d for g, d in zip(golden_out, locked_out)]
        dist = hamming_per_pattern(diffs, width)
        match = (o_size - dist) / o_size
        total += float(np.mean(1.0 - np.abs(2.0 * match - 1.0)))
    return 100.0 * total / len(keys), width, exhaustive


def composite_score(t_index: float, c_index: float, f_index: float) -> float:
    """Equal-weight mean of the three indexes."""
    for v in (t_index, c_index, f_index):
        if not 0.0 <= v <= 100.0:
            raise ValueError(f"index {v} outside [0, 100]")
    return (t_index + c_index + f_index) / 3.0


def metrics_report(
    golden: Netlist,
    locked: Netlist,
    keys: list[tuple[int, ...]],
    max_depth: int | None = None,
    p_total: int = 1000,
    seed: int = 0,
) -> MetricsReport:
    """All three indexes plus their composite for a locked netlist."""
    depth = default_max_depth(locked) if max_depth is None else max_depth
    t = scatter_index(locked, depth)
    c, covered = coverage_index(locked)
    f, used, exhaustive = formality_index(golden, locked, keys, p_total=p_total, seed=seed)
    return MetricsReport(
        t_index=t,
        c_index=c,
        f_index=f,
        composite=composite_score(t, c, f),
        max_depth=depth,
        p_total=used,
        exhaustive=exhaustive,
        key_entry_nodes=tuple(key_entry_nodes(locked)),
        covered_gates=covered,
        gates_total=locked.gate_count,
        wrong_keys_used=len(keys),
        seed=seed,
    )
