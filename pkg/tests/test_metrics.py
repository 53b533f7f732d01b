import random
from collections import deque

import pytest

from crosscheck_data import COMPOSITE_CELLS
from ttlock.generate import random_netlist
from ttlock.locking import lock_netlist, xor_lock
from ttlock.metrics import (
    composite_score,
    coverage_index,
    default_max_depth,
    formality_index,
    key_entry_nodes,
    metrics_report,
    sample_wrong_keys,
    scatter_index,
)
from ttlock.netlist import NetlistError, parse_bench
from ttlock.simulate import PortMismatchError


def bfs_distance_oracle(n, sources):
    """Independent undirected BFS over driver<->sink gate adjacency."""
    adj = {g.id: set() for g in n.gates}
    for net in n.nets:
        if net.driver is not None:
            for s in net.sinks:
                adj[net.driver].add(s)
                adj[s].add(net.driver)
    dist = {s: 0 for s in sources}
    q = deque(sources)
    while q:
        v = q.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                q.append(u)
    return dist


def reach_oracle(n, gid):
    """Directed reachability (gates strictly downstream of gate gid)."""
    out = set()
    q = deque(n.nets[n.gates[gid].output].sinks)
    while q:
        v = q.popleft()
        if v in out:
            continue
        out.add(v)
        q.extend(n.nets[n.gates[v].output].sinks)
    return out


def chain_locked(entry_pos, length=5):
    """length-gate chain with one XOR key gate spliced at entry_pos."""
    lines = ["INPUT(a)", "INPUT(keyinput0)", "OUTPUT(o)"]
    prev = "a"
    for i in range(length):
        name = "o" if i == length - 1 else f"w{i}"
        if i == entry_pos:
            lines.append(f"{name} = XOR({prev}, keyinput0)")
        else:
            lines.append(f"{name} = NOT({prev})")
        prev = name
    return parse_bench("\n".join(lines) + "\n")


def test_key_entry_nodes_simple():
    n = parse_bench("INPUT(a)\nINPUT(keyinput0)\nOUTPUT(o)\nw = NOT(a)\no = XOR(keyinput0, w)\n")
    assert key_entry_nodes(n) == [1]


def test_key_entry_nodes_fanout():
    txt = "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(x)\nOUTPUT(y)\n" \
          "x = XOR(a, keyinput0)\ny = XNOR(a, keyinput0)\n"
    assert key_entry_nodes(parse_bench(txt)) == [0, 1]


def test_key_entry_requires_keys(c17):
    with pytest.raises(NetlistError):
        key_entry_nodes(c17)


def test_scatter_every_gate_is_entry():
    txt = "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(x)\nOUTPUT(y)\n" \
          "x = XOR(a, keyinput0)\ny = XNOR(a, keyinput0)\n"
    assert scatter_index(parse_bench(txt), 0) == 100.0


def test_scatter_chain_end_vs_middle():
    end = chain_locked(4)
    assert scatter_index(end, 1) == pytest.approx(40.0)
    mid = chain_locked(2)
    assert scatter_index(mid, 1) == pytest.approx(60.0)


def test_scatter_full_depth_connected():
    n = chain_locked(0)
    assert scatter_index(n, 5) == 100.0


def test_scatter_monotone_in_depth():
    locked, _ = xor_lock(random_netlist(60, 8, seed=4), 4, seed=1)
    values = [scatter_index(locked, d) for d in range(0, 12)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_scatter_matches_bfs_oracle():
    for seed in range(5):
        locked, _ = xor_lock(random_netlist(50, 7, seed=seed), 4, seed=seed)
        entries = key_entry_nodes(locked)
        dist = bfs_distance_oracle(locked, entries)
        for depth in (1, 2, 4):
            expect = 100.0 * sum(1 for d in dist.values() if d <= depth) / locked.gate_count
            assert scatter_index(locked, depth) == pytest.approx(expect)


def test_coverage_single_entry_driving_po():
    n = parse_bench("INPUT(a)\nINPUT(keyinput0)\nOUTPUT(o)\nw = NOT(a)\no = XOR(w, keyinput0)\n")
    c, covered = coverage_index(n)
    assert covered == 1
    assert c == pytest.approx(100.0 * 1 / 2)


def test_coverage_root_entry_covers_all():
    n = chain_locked(0)
    c, covered = coverage_index(n)
    assert covered == 5
    assert c == 100.0


def test_coverage_union_vs_sum_overlap():
    # two key gates whose cones share the same downstream AND
    txt = "INPUT(a)\nINPUT(b)\nINPUT(keyinput0)\nINPUT(keyinput1)\nOUTPUT(o)\n" \
          "x = XOR(a, keyinput0)\ny = XOR(b, keyinput1)\no = AND(x, y)\n"
    n = parse_bench(txt)
    entries = key_entry_nodes(n)
    union_expected = set(entries)
    for e in entries:
        union_expected |= reach_oracle(n, e)
    c_union, covered = coverage_index(n)
    assert covered == len(union_expected) == 3
    assert c_union == pytest.approx(100.0)
    c_sum, count_sum = coverage_index(n, union=False)
    assert count_sum == 4  # overlap double-counted
    assert c_sum > 100.0


def test_coverage_bounds_random():
    for seed in range(5):
        locked, _ = xor_lock(random_netlist(80, 8, seed=seed), 6, seed=seed)
        c, covered = coverage_index(locked)
        entries = key_entry_nodes(locked)
        assert c >= 100.0 * len(entries) / locked.gate_count
        assert c <= 100.0


def test_formality_correct_key_zero():
    n = random_netlist(40, 6, seed=9)
    res = lock_netlist(n, k_size=4, seed=2)
    f, _, exhaustive = formality_index(n, res.netlist, [res.key_bits])
    assert f == 0.0
    assert exhaustive


def test_formality_all_outputs_inverted_zero():
    golden = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)\n")
    # locked ignores key and inverts the single output everywhere
    locked = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(keyinput0)\nOUTPUT(o)\n"
        "dead = BUF(keyinput0)\no = NAND(a, b)\n"
    )
    f, _, _ = formality_index(golden, locked, [(0,), (1,)])
    assert f == 0.0


def test_formality_half_bits_wrong_is_100():
    golden = parse_bench(
        "INPUT(a)\nOUTPUT(x)\nOUTPUT(y)\nx = BUF(a)\ny = NOT(a)\n"
    )
    locked = parse_bench(
        "INPUT(a)\nINPUT(keyinput0)\nOUTPUT(x)\nOUTPUT(y)\n"
        "x = XOR(a, keyinput0)\ny = NOT(a)\n"
    )
    f, _, _ = formality_index(golden, locked, [(1,)])
    assert f == pytest.approx(100.0)


def test_formality_symmetry_of_match_rate():
    # term(x) == term(1-x) directly on the per-pattern formula
    for x in (0.0, 0.25, 0.4, 0.5, 0.9, 1.0):
        a = 1 - abs(2 * x - 1)
        b = 1 - abs(2 * (1 - x) - 1)
        assert a == pytest.approx(b)


def test_formality_port_mismatch():
    golden = parse_bench("INPUT(a)\nOUTPUT(o)\no = NOT(a)\n")
    other = parse_bench("INPUT(b)\nINPUT(keyinput0)\nOUTPUT(o)\no = XOR(b, keyinput0)\n")
    with pytest.raises(PortMismatchError):
        formality_index(golden, other, [(0,)])


def test_sample_wrong_keys_excludes_correct():
    keys = sample_wrong_keys(4, (1, 0, 1, 0), 32, seed=3)
    assert len(keys) == 32
    assert (1, 0, 1, 0) not in keys
    assert sample_wrong_keys(4, (1, 0, 1, 0), 32, seed=3) == keys


def test_sample_wrong_keys_tiny_space():
    keys = sample_wrong_keys(1, (0,), 5, seed=0)
    assert keys == [(1,)] * 5


def test_composite_published_cells():
    for bench, per_tech in COMPOSITE_CELLS.items():
        for tech, ((f, t, c), expected) in per_tech.items():
            got = composite_score(t, c, f)
            assert abs(got - expected) <= 0.01 + 1e-9, (bench, tech, got, expected)


def test_composite_trivial():
    assert composite_score(0, 0, 0) == 0.0
    with pytest.raises(ValueError):
        composite_score(-1, 0, 0)
    with pytest.raises(ValueError):
        composite_score(0, 101, 0)


def test_default_max_depth_rule():
    n = random_netlist(64, 8, seed=1)
    locked, _ = xor_lock(n, 4, seed=1)
    assert default_max_depth(locked) == locked.gate_count // 4
    tiny = parse_bench(
        "INPUT(a)\nINPUT(keyinput0)\nINPUT(keyinput1)\nOUTPUT(o)\n"
        "o = XOR(keyinput0, keyinput1)\n"
    )
    assert default_max_depth(tiny) == 1  # 1 gate // 2 keys clamps to 1


def test_metrics_report_end_to_end():
    n = random_netlist(60, 8, seed=12)
    res = lock_netlist(n, k_size=6, seed=3)
    keys = sample_wrong_keys(6, res.key_bits, 8, seed=5)
    rep = metrics_report(n, res.netlist, keys, seed=5)
    assert 0 <= rep.t_index <= 100
    assert 0 <= rep.c_index <= 100
    assert 0 <= rep.f_index <= 100
    assert rep.composite == pytest.approx((rep.t_index + rep.c_index + rep.f_index) / 3)
    assert rep.f_index > 0  # wrong keys corrupt something
    assert rep.to_json()["schema_version"] == 1
    again = metrics_report(n, res.netlist, keys, seed=5)
    assert again == rep
