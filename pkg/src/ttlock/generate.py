"""Seeded random combinational netlist generator for corpora and benchmarks."""

from __future__ import annotations

import random

from .netlist import GateKind, Netlist, NetlistBuilder

_BINARY_KINDS = (
    GateKind.AND,
    GateKind.NAND,
    GateKind.OR,
    GateKind.NOR,
    GateKind.XOR,
    GateKind.XNOR,
)


def random_netlist(
    n_gates: int,
    n_pi: int,
    seed: int = 0,
    max_fanin: int = 3,
    not_fraction: float = 0.15,
    locality: int = 12,
    name: str | None = None,
) -> Netlist:
    """Build a connected random DAG of `n_gates` gates over `n_pi` inputs.

    Gate inputs are biased toward recently created nets so the circuit gains
    logic depth instead of collapsing into a flat fanout tree. Every net
    without sinks becomes a primary output, so no gate is dead.
    """
    if n_gates < 1 or n_pi < 1:
        raise ValueError("need at least one gate and one input")
    rng = random.Random(seed)
    b = NetlistBuilder(name or f"rand{n_gates}g{seed}")
    nets = [b.add_input(f"i{k}") for k in range(n_pi)]
    for gid in range(n_gates):
        if rng.random() < not_fraction:
            kind, arity = GateKind.NOT, 1
        else:
            kind = rng.choice(_BINARY_KINDS)
            arity = rng.randint(2, max(2, min(max_fanin, len(nets))))
        chosen: list[int] = []
        for _ in range(arity):
            if rng.random() < 0.8 and len(nets) > locality:
                pick = nets[rng.randrange(len(nets) - locality, len(nets))]
            else:
                pick = nets[rng.randrange(len(nets))]
            chosen.append(pick)
        if kind is not GateKind.NOT and len(set(chosen)) == 1 and len(nets) > 1:
            # duplicate-only input lists degenerate to constants for XOR/XNOR
            alt = nets[rng.randrange(len(nets))]
            chosen[-1] = alt
        nets.append(b.add_gate(kind, chosen, f"w{gid}"))
    sink_counts = {nid: 0 for nid in nets}
    for kind, ins, out in b._gates:
        for i in ins:
            if i in sink_counts:
                sink_counts[i] += 1
    dangling = [nid for nid in nets if sink_counts[nid] == 0 and b._drivers[nid] is not None]
    if not dangling:
        dangling = [nets[-1]]
    for nid in dangling:
        b.mark_output(nid)
    return b.build()
