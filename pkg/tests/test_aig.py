from ttlock.aig import to_aig
from ttlock.generate import random_netlist
from ttlock.netlist import GateKind, parse_bench, topo_order
from ttlock.simulate import equivalence_check


def only_and_not(n):
    return all(g.kind in (GateKind.AND, GateKind.NOT) for g in n.gates)


def arity_two_ands(n):
    return all(len(g.inputs) == 2 for g in n.gates if g.kind is GateKind.AND)


def test_or_demorgan():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = OR(a, b)\n")
    a = to_aig(n)
    assert only_and_not(a) and arity_two_ands(a)
    assert a.gate_count == 4  # NOT a, NOT b, AND, final NOT
    assert equivalence_check(n, a).equivalent


def test_xor_expansion():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = XOR(a, b)\n")
    a = to_aig(n)
    assert only_and_not(a) and arity_two_ands(a)
    kinds = [g.kind for g in a.gates]
    assert kinds.count(GateKind.AND) == 3
    assert kinds.count(GateKind.NOT) == 4
    assert equivalence_check(n, a).equivalent


def test_buf_alias_is_free():
    n = parse_bench("INPUT(a)\nOUTPUT(o)\nw = BUF(a)\no = NOT(w)\n")
    a = to_aig(n)
    assert a.gate_count == 1
    assert equivalence_check(n, a).equivalent


def test_buf_driving_po_keeps_name():
    n = parse_bench("INPUT(a)\nOUTPUT(o)\no = BUF(a)\n")
    a = to_aig(n)
    assert a.po_names() == ["o"]
    assert only_and_not(a)
    assert equivalence_check(n, a).equivalent


def test_wide_gates_and_equivalence(c17):
    a = to_aig(c17)
    assert only_and_not(a) and arity_two_ands(a)
    assert equivalence_check(c17, a).equivalent


def test_random_netlists_equivalent_and_acyclic():
    for seed in range(10):
        n = random_netlist(60, 8, seed=seed)
        a = to_aig(n)
        assert only_and_not(a) and arity_two_ands(a)
        topo_order(a)  # raises on cycles
        assert equivalence_check(n, a).equivalent
        assert a.pi_names() == n.pi_names()
        assert a.po_names() == n.po_names()


def test_sampled_equivalence_above_exhaustive_cutoff():
    n = random_netlist(120, 18, seed=3)
    a = to_aig(n)
    rep = equivalence_check(n, a, mode="sampled", patterns=1000, seed=1)
    assert rep.equivalent
