"""Universal-gate rewriting: everything into 2-input ANDs plus inverters."""

from __future__ import annotations

from .netlist import GateKind, Netlist, NetlistBuilder, topo_order


def to_aig(n: Netlist) -> Netlist:
    """Functionally equivalent netlist using only AND (arity 2) and NOT gates.

    Wide gates decompose into left-leaning 2-input trees; XOR pairs expand as
    AND(NAND(x,y), OR(x,y)). No structural hashing or rewriting is attempted;
    later optimization passes clean up. Internal BUF gates collapse into wire
    aliases; a BUF driving a primary output keeps its net name via two
    inverters.
    """
    b = NetlistBuilder(n.name)
    taken = {net.name for net in n.nets}
    alias: dict[int, int] = {}
    for nid in n.primary_inputs + n.key_inputs:
        alias[nid] = b.add_input(n.nets[nid].name)
    po_net_ids = set(n.primary_outputs)
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            counter += 1
            name = f"u{counter}"
            if name not in taken:
                taken.add(name)
                return name

    def mk_not(src: int, out_name: str | None = None) -> int:
        return b.add_gate(GateKind.NOT, (src,), out_name or fresh())

    def mk_and(x: int, y: int, out_name: str | None = None) -> int:
        return b.add_gate(GateKind.AND, (x, y), out_name or fresh())

    def and_tree(terms: list[int], out_name: str | None) -> int:
        acc = terms[0]
        for t in terms[1:-1]:
            acc = mk_and(acc, t)
        return mk_and(acc, terms[-1], out_name)

    def xor2(x: int, y: int, out_name: str | None) -> int:
        nand_xy = mk_not(mk_and(x, y))
        or_xy = mk_not(mk_and(mk_not(x), mk_not(y)))
        return mk_and(nand_xy, or_xy, out_name)

    for gid in topo_order(n).order:
        g = n.gates[gid]
        out_name = n.nets[g.output].name
        ins = [alias[i] for i in g.inputs]
        kind = g.kind
        if kind is GateKind.BUF:
            if g.output in po_net_ids:
                alias[g.output] = mk_not(mk_not(ins[0]), out_name)
            else:
                alias[g.output] = ins[0]
        elif kind is GateKind.NOT:
            alias[g.output] = mk_not(ins[0], out_name)
        elif kind is GateKind.AND:
            alias[g.output] = and_tree(ins, out_name)
        elif kind is GateKind.NAND:
            alias[g.output] = mk_not(and_tree(ins, None), out_name)
        elif kind is GateKind.OR:
            alias[g.output] = mk_not(and_tree([mk_not(i) for i in ins], None), out_name)
        elif kind is GateKind.NOR:
            alias[g.output] = and_tree([mk_not(i) for i in ins], out_name)
        else:  # XOR / XNOR parity chains
            acc = ins[0]
            for t in ins[1:-1]:
                acc = xor2(acc, t, None)
            if kind is GateKind.XOR:
                alias[g.output] = xor2(acc, ins[-1], out_name)
            else:
                alias[g.output] = mk_not(xor2(acc, ins[-1], None), out_name)

    for nid in n.primary_outputs:
        b.mark_output(alias[nid])
    return b.build()
