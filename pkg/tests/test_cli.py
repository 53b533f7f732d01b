import json
import subprocess
import sys

import pytest

from ttlock.cli import main
from ttlock.generate import random_netlist
from ttlock.locking import hex_to_key
from ttlock.netlist import emit_bench, parse_bench
from ttlock.simulate import equivalence_check


@pytest.fixture
def workdir(tmp_path):
    n = random_netlist(60, 8, seed=40)
    bench = tmp_path / "orig.bench"
    bench.write_text(emit_bench(n))
    return tmp_path, bench, n


def run_lock(tmp_path, bench, seed=7, extra=()):
    out = tmp_path / "locked.bench"
    key = tmp_path / "key.hex"
    man = tmp_path / "manifest.json"
    rc = main([
        "lock", str(bench), "--key-size", "6", "--seed", str(seed),
        "-o", str(out), "--key-out", str(key), "--manifest", str(man),
        *extra,
    ])
    return rc, out, key, man


def test_lock_writes_all_outputs(workdir, capsys):
    tmp_path, bench, n = workdir
    rc, out, key, man = run_lock(tmp_path, bench)
    assert rc == 0
    assert out.exists() and key.exists() and man.exists()
    locked = parse_bench(out.read_text())
    key_bits = hex_to_key(key.read_text(), locked.key_size)
    assert equivalence_check(n, locked, key=key_bits).equivalent
    manifest = json.loads(man.read_text())
    assert manifest["schema_version"] == 1
    assert manifest["correct_key_hex"] == key.read_text().strip()
    summary = json.loads(capsys.readouterr().out)
    assert summary["kind"] == "lock_summary"


def test_lock_deterministic(workdir, capsys):
    tmp_path, bench, _ = workdir
    rc1, out1, key1, man1 = run_lock(tmp_path, bench, seed=3)
    first = (out1.read_text(), key1.read_text(), man1.read_text())
    capsys.readouterr()
    rc2, out2, key2, man2 = run_lock(tmp_path, bench, seed=3)
    assert (out2.read_text(), key2.read_text(), man2.read_text()) == first


def test_lock_partition_size_override(workdir, capsys):
    tmp_path, bench, n = workdir
    rc, out, key, man = run_lock(tmp_path, bench, extra=["--partition-size", "25"])
    assert rc == 0
    manifest = json.loads(man.read_text())
    assert manifest["partition_size"] == 25
    import math

    assert manifest["partition_count"] == math.ceil(n.gate_count / 25)


def test_lock_parse_error_exit1(tmp_path, capsys):
    bad = tmp_path / "bad.bench"
    bad.write_text("this is not bench\n")
    rc = main(["lock", str(bad), "--key-size", "2",
               "-o", str(tmp_path / "x"), "--key-out", str(tmp_path / "y"),
               "--manifest", str(tmp_path / "z")])
    assert rc == 1


def test_lock_nothing_lockable_exit2(tmp_path, capsys):
    f = tmp_path / "tiny.bench"
    f.write_text("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)\n")
    rc = main(["lock", str(f), "--key-size", "1", "--min-depth", "9",
               "-o", str(tmp_path / "x"), "--key-out", str(tmp_path / "y"),
               "--manifest", str(tmp_path / "z")])
    assert rc == 2


def test_lock_io_error_exit3(tmp_path, capsys):
    rc = main(["lock", str(tmp_path / "missing.bench"), "--key-size", "2",
               "-o", str(tmp_path / "x"), "--key-out", str(tmp_path / "y"),
               "--manifest", str(tmp_path / "z")])
    assert rc == 3


def test_metrics_cli(workdir, capsys):
    tmp_path, bench, _ = workdir
    rc, out, key, man = run_lock(tmp_path, bench)
    capsys.readouterr()
    rc = main(["metrics", str(bench), str(out), "--key", str(key),
               "--random-wrong-keys", "4", "--seed", "2",
               "--out", str(tmp_path / "metrics.json")])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["kind"] == "metrics_report"
    assert rep["f_index"] > 0
    assert json.loads((tmp_path / "metrics.json").read_text()) == rep


def test_metrics_auto_max_depth(workdir, capsys):
    tmp_path, bench, n = workdir
    rc, out, key, man = run_lock(tmp_path, bench)
    capsys.readouterr()
    main(["metrics", str(bench), str(out), "--key", str(key)])
    rep = json.loads(capsys.readouterr().out)
    locked = parse_bench(out.read_text())
    assert rep["max_depth"] == max(1, locked.gate_count // locked.key_size)


def test_metrics_compose_mode(capsys):
    rc = main(["metrics", "--compose", "47.2", "13.4", "72.4"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["composite"] == pytest.approx(44.33, abs=0.01)


def test_metrics_port_mismatch_exit4(workdir, tmp_path, capsys):
    _, bench, _ = workdir
    other = tmp_path / "other.bench"
    other.write_text(emit_bench(random_netlist(20, 4, seed=1)))
    lockdir, b2, _ = workdir
    rc, out, key, man = run_lock(lockdir, b2)
    capsys.readouterr()
    rc = main(["metrics", str(other), str(out)])
    assert rc == 4


def test_attack_cli_brute_and_dip(workdir, capsys):
    tmp_path, bench, _ = workdir
    rc, out, key, man = run_lock(tmp_path, bench)
    capsys.readouterr()
    rc = main(["attack", str(out), str(bench), "--attack", "brute",
               "--true-key", str(key)])
    assert rc == 0
    res = json.loads(capsys.readouterr().out)
    assert res["result"]["correct_key_in_set"] is True
    rc = main(["attack", str(out), str(bench), "--attack", "dip",
               "--true-key", str(key), "--table", str(tmp_path / "table.json")])
    assert rc == 0
    res = json.loads(capsys.readouterr().out)
    assert res["result"]["extra"]["surviving_keys"] >= 1
    table = json.loads((tmp_path / "table.json").read_text())
    assert "dip" in table["locked"]


def test_attack_table_merge_idempotent(workdir, capsys):
    tmp_path, bench, _ = workdir
    rc, out, key, man = run_lock(tmp_path, bench)
    capsys.readouterr()
    args = ["attack", str(out), str(bench), "--attack", "dip",
            "--table", str(tmp_path / "t.json")]
    main(args)
    first = (tmp_path / "t.json").read_text()
    capsys.readouterr()
    main(args)
    assert (tmp_path / "t.json").read_text() == first


def test_attack_limit_exit5(tmp_path, capsys):
    n = random_netlist(60, 17, seed=3)
    from ttlock.locking import xor_lock

    locked, bits = xor_lock(n, 4, seed=0)
    orig = tmp_path / "o.bench"
    lock = tmp_path / "l.bench"
    orig.write_text(emit_bench(n))
    lock.write_text(emit_bench(locked))
    rc = main(["attack", str(lock), str(orig), "--attack", "dip"])
    assert rc == 5


def test_stats_cli_single_row(capsys):
    rc = main(["stats", "--n", "3", "--k", "2", "--d", "1"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["rows"][0]["entries"] == 48
    assert rep["rows"][0]["f_count"] == 2**48


def test_stats_cli_from_manifest(workdir, capsys):
    tmp_path, bench, _ = workdir
    rc, out, key, man = run_lock(tmp_path, bench)
    capsys.readouterr()
    rc = main(["stats", "--from-manifest", str(man)])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert all(r["partition"] is not None for r in rep["rows"])


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "ttlock.cli", "stats", "--n", "3", "--k", "1", "--d", "0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["f_count"] == 256
