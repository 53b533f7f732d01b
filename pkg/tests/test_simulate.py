import random

import pytest

from ttlock.generate import random_netlist
from ttlock.netlist import GateKind, NetlistError, parse_bench
from ttlock.simulate import (
    Assignment,
    PortMismatchError,
    equivalence_check,
    simulate,
    simulate_words,
    variable_mask,
)


def recursive_eval_oracle(n, pi_bits, key_bits):
    """Independent reference evaluator: memoized recursion over net drivers."""
    values = {}
    for nid, b in zip(n.primary_inputs, pi_bits):
        values[nid] = b
    for nid, b in zip(n.key_inputs, key_bits):
        values[nid] = b

    def net_value(nid):
        if nid in values:
            return values[nid]
        g = n.gates[n.nets[nid].driver]
        ins = [net_value(i) for i in g.inputs]
        k = g.kind
        if k is GateKind.AND:
            v = int(all(ins))
        elif k is GateKind.NAND:
            v = int(not all(ins))
        elif k is GateKind.OR:
            v = int(any(ins))
        elif k is GateKind.NOR:
            v = int(not any(ins))
        elif k is GateKind.XOR:
            v = sum(ins) % 2
        elif k is GateKind.XNOR:
            v = (sum(ins) + 1) % 2
        elif k is GateKind.NOT:
            v = 1 - ins[0]
        else:
            v = ins[0]
        values[nid] = v
        return v

    return tuple(net_value(o) for o in n.primary_outputs)


def test_and_truth_table():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)\n")
    assert simulate(n, Assignment((1, 1))) == (1,)
    assert simulate(n, Assignment((1, 0))) == (0,)
    assert simulate(n, Assignment((0, 1))) == (0,)
    assert simulate(n, Assignment((0, 0))) == (0,)


def test_xnor_truth_table():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = XNOR(a, b)\n")
    assert simulate(n, Assignment((0, 0))) == (1,)
    assert simulate(n, Assignment((1, 0))) == (0,)


def test_c17_all_patterns_vs_oracle(c17):
    for p in range(32):
        bits = tuple((p >> i) & 1 for i in range(5))
        assert simulate(c17, Assignment(bits)) == recursive_eval_oracle(c17, bits, ())


def test_variable_mask():
    assert variable_mask(0, 3) == 0b10101010
    assert variable_mask(1, 3) == 0b11001100
    assert variable_mask(2, 3) == 0b11110000


def test_batch_agrees_with_single(c17):
    words = [variable_mask(i, 5) for i in range(5)]
    packed = simulate_words(c17, words, [], 32)
    for p in range(32):
        bits = tuple((p >> i) & 1 for i in range(5))
        single = simulate(c17, Assignment(bits))
        assert tuple((w >> p) & 1 for w in packed) == single


def test_simulation_vs_oracle_random():
    rng = random.Random(42)
    trials = 0
    for seed in range(20):
        n = random_netlist(rng.randint(5, 50), rng.randint(2, 8), seed=seed)
        for _ in range(50):
            bits = tuple(rng.randint(0, 1) for _ in n.primary_inputs)
            assert simulate(n, Assignment(bits)) == recursive_eval_oracle(n, bits, ())
            trials += 1
    assert trials == 1000


def test_length_mismatch():
    n = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)\n")
    with pytest.raises(NetlistError):
        simulate(n, Assignment((1,)))


def test_equiv_reflexive(c17):
    rep = equivalence_check(c17, c17)
    assert rep.equivalent
    assert rep.patterns_applied == 32
    assert rep.hamming_histogram == {0: 32}


def test_equiv_inverted_output():
    golden = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)\n")
    flipped = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = NAND(a, b)\n")
    rep = equivalence_check(golden, flipped)
    assert rep.mismatched_patterns == rep.patterns_applied == 4
    assert rep.hamming_histogram == {1: 4}
    assert sum(rep.hamming_histogram.values()) == rep.patterns_applied


def test_equiv_sampled_reproducible(c17):
    a = equivalence_check(c17, c17, mode="sampled", patterns=64, seed=9)
    b = equivalence_check(c17, c17, mode="sampled", patterns=64, seed=9)
    assert a == b
    assert a.patterns_applied == 64
    assert not a.exhaustive


def test_equiv_port_mismatch(c17):
    other = parse_bench("INPUT(a)\nOUTPUT(o)\no = NOT(a)\n")
    with pytest.raises(PortMismatchError):
        equivalence_check(c17, other)


def test_equiv_pi_limit():
    n = random_netlist(30, 21, seed=1)
    with pytest.raises(NetlistError):
        equivalence_check(n, n)


def test_key_applied_to_dut_only():
    golden = parse_bench("INPUT(a)\nOUTPUT(o)\no = NOT(a)\n")
    locked = parse_bench(
        "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(o)\nw = NOT(a)\no = XOR(w, keyinput0)\n"
    )
    assert equivalence_check(golden, locked, key=(0,)).equivalent
    rep = equivalence_check(golden, locked, key=(1,))
    assert rep.mismatched_patterns == rep.patterns_applied
