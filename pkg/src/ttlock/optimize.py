"""Netlist cleanup passes and unit-weight area/delay/power estimation.

This is the internal stand-in for a synthesis tool: constant propagation
and dead-gate removal feed the overhead report and the per-key-bit sweep
analysis; estimates are relative unit weights, not library cells.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .netlist import GateKind, Netlist, NetlistBuilder, NetlistError, topo_order


@dataclass(frozen=True)
class EstimateReport:
    area: int
    delay: int
    power: float

    def to_json(self) -> dict:
        return {"area": self.area, "delay": self.delay, "power": round(self.power, 4)}


_CONST = "const"
_ALIAS = "alias"


def propagate_constants(n: Netlist, fixed: dict[str | int, int]) -> Netlist:
    """Simplify gates under fixed input values, to fixpoint.

    `fixed` maps primary/key input nets (by name or id) to 0/1; those ports
    disappear from the result. Equivalence over the remaining inputs is
    preserved. Gates left dangling are not removed here (see
    eliminate_dead).
    """
    fixed_ids: dict[int, int] = {}
    input_ids = set(n.primary_inputs) | set(n.key_inputs)
    for key, bit in fixed.items():
        nid = n.net_named(key).id if isinstance(key, str) else key
        if nid not in input_ids:
            raise NetlistError(f"net {key!r} is not a primary or key input")
        fixed_ids[nid] = int(bit)

    b = NetlistBuilder(n.name)
    taken = {net.name for net in n.nets}
    status: dict[int, tuple[str, int]] = {}
    for nid in n.primary_inputs + n.key_inputs:
        if nid in fixed_ids:
            status[nid] = (_CONST, fixed_ids[nid])
        else:
            status[nid] = (_ALIAS, b.add_input(n.nets[nid].name))

    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            counter += 1
            name = f"c{counter}"
            if name not in taken:
                taken.add(name)
                return name

    const_net: dict[int, int] = {}

    def const(bit: int) -> int:
        if bit not in const_net:
            anchor = next((status[x][1] for x in n.primary_inputs + n.key_inputs
                           if status[x][0] == _ALIAS), None)
            if anchor is None:
                raise NetlistError("cannot realize constants: every input is fixed")
            na = b.add_gate(GateKind.NOT, (anchor,), fresh())
            const_net[0] = b.add_gate(GateKind.AND, (anchor, na), fresh())
            const_net[1] = b.add_gate(GateKind.NOT, (const_net[0],), fresh())
        return const_net[bit]

    for gid in topo_order(n).order:
        g = n.gates[gid]
        out_name = n.nets[g.output].name
        consts: list[int] = []
        live: list[int] = []
        for i in g.inputs:
            kind_, val = status[i]
            if kind_ == _CONST:
                consts.append(val)
            else:
                live.append(val)
        status[g.output] = _simplify_gate(b, g.kind, consts, live, out_name)

    for nid in n.primary_outputs:
        kind_, val = status[nid]
        if kind_ == _CONST:
            src = const(val)
            b.add_gate(GateKind.BUF, (src,), n.nets[nid].name)
        elif b._net_names[val] != n.nets[nid].name:
            # the output collapsed onto another net; keep the port name alive
            b.add_gate(GateKind.BUF, (val,), n.nets[nid].name)
        b.mark_output(b.ensure_net(n.nets[nid].name))
    return b.build()


def _simplify_gate(b: NetlistBuilder, kind: GateKind, consts: list[int],
                   live: list[int], out_name: str) -> tuple[str, int]:
    """Fold constants/duplicates into a smaller gate, an alias, or a constant."""
    if kind is GateKind.BUF:
        return (_CONST, consts[0]) if consts else (_ALIAS, live[0])
    if kind is GateKind.NOT:
        return (_CONST, 1 - consts[0]) if consts else \
            (_ALIAS, b.add_gate(GateKind.NOT, (live[0],), out_name))
    if kind in (GateKind.AND, GateKind.NAND):
        inv = kind is GateKind.NAND
        if 0 in consts:
            return (_CONST, 1 if inv else 0)
        uniq = sorted(set(live))
        if not uniq:
            return (_CONST, 0 if inv else 1)
        if len(uniq) == 1:
            return (_ALIAS, b.add_gate(GateKind.NOT, (uniq[0],), out_name)) if inv \
                else (_ALIAS, uniq[0])
        return (_ALIAS, b.add_gate(GateKind.NAND if inv else GateKind.AND, uniq, out_name))
    if kind in (GateKind.OR, GateKind.NOR):
        inv = kind is GateKind.NOR
        if 1 in consts:
            return (_CONST, 0 if inv else 1)
        uniq = sorted(set(live))
        if not uniq:
            return (_CONST, 1 if inv else 0)
        if len(uniq) == 1:
            return (_ALIAS, b.add_gate(GateKind.NOT, (uniq[0],), out_name)) if inv \
                else (_ALIAS, uniq[0])
        return (_ALIAS, b.add_gate(GateKind.NOR if inv else GateKind.OR, uniq, out_name))
    # XOR / XNOR: constants and duplicate pairs fold into the parity
    parity = sum(consts) % 2
    if kind is GateKind.XNOR:
        parity ^= 1
    counts: dict[int, int] = {}
    for x in live:
        counts[x] = counts.get(x, 0) + 1
    odd = sorted(x for x, c in counts.items() if c % 2)
    if not odd:
        return (_CONST, parity)
    if len(odd) == 1:
        return (_ALIAS, b.add_gate(GateKind.NOT, (odd[0],), out_name)) if parity \
            else (_ALIAS, odd[0])
    return (_ALIAS, b.add_gate(GateKind.XNOR if parity else GateKind.XOR, odd, out_name))


def eliminate_dead(n: Netlist) -> Netlist:
    """Drop gates with no path to any primary output; ports are untouched."""
    live_nets: set[int] = set(n.primary_outputs)
    live_gates: set[int] = set()
    stack = list(n.primary_outputs)
    while stack:
        nid = stack.pop()
        drv = n.nets[nid].driver
        if drv is None or drv in live_gates:
            continue
        live_gates.add(drv)
        for i in n.gates[drv].inputs:
            if i not in live_nets:
                live_nets.add(i)
                stack.append(i)
    b = NetlistBuilder(n.name)
    for nid in n.primary_inputs + n.key_inputs:
        b.add_input(n.nets[nid].name)
    for g in n.gates:
        if g.id in live_gates:
            b.add_gate(g.kind, [b.ensure_net(n.nets[i].name) for i in g.inputs],
                       n.nets[g.output].name)
    for nid in n.primary_outputs:
        b.mark_output(b.ensure_net(n.nets[nid].name))
    return b.build()


def gate_weight(g) -> int:
    return 1 if g.kind.is_unary else len(g.inputs)


def estimate(n: Netlist, patterns: int = 1000, seed: int = 0) -> EstimateReport:
    """Unit-weight area, level depth, and toggle-count power proxy.

    Power is the mean number of gate-output value changes between
    consecutive seeded random patterns (all inputs randomized).
    """
    area = sum(gate_weight(g) for g in n.gates)
    topo = topo_order(n)
    delay = max(topo.level.values(), default=0)
    if not n.gates or patterns < 1:
        return EstimateReport(area=area, delay=delay, power=0.0)
    rng = random.Random(seed)
    width = patterns + 1
    pi_words = [rng.getrandbits(width) for _ in n.primary_inputs]
    key_words = [rng.getrandbits(width) for _ in n.key_inputs]
    mask = (1 << patterns) - 1
    toggles = 0
    outs = _all_gate_words(n, pi_words, key_words, width)
    for w in outs:
        toggles += bin((w ^ (w >> 1)) & mask).count("1")
    return EstimateReport(area=area, delay=delay, power=toggles / patterns)


def _all_gate_words(n: Netlist, pi_words, key_words, width):
    from .simulate import _eval_gate

    mask = (1 << width) - 1
    values: list[int] = [0] * len(n.nets)
    for nid, w in zip(n.primary_inputs, pi_words):
        values[nid] = w & mask
    for nid, w in zip(n.key_inputs, key_words):
        values[nid] = w & mask
    out = []
    for gid in topo_order(n).order:
        g = n.gates[gid]
        v = _eval_gate(g.kind, [values[i] for i in g.inputs], mask)
        values[g.output] = v
        out.append(v)
    return out


def overhead_report(original: Netlist, locked: Netlist,
                    patterns: int = 1000, seed: int = 0) -> dict:
    """Original/locked estimates plus relative percentage deltas."""
    a = estimate(original, patterns, seed)
    b = estimate(locked, patterns, seed)

    def delta(x, y):
        return round(100.0 * (y - x) / x, 4) if x else None

    return {
        "schema_version": 1,
        "kind": "overhead_report",
        "original": a.to_json(),
        "locked": b.to_json(),
        "area_delta_pct": delta(a.area, b.area),
        "delay_delta_pct": delta(a.delay, b.delay),
        "power_delta_pct": delta(a.power, b.power),
    }
