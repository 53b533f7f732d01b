import pytest
from fastapi.testclient import TestClient

from ttlock.generate import random_netlist
from ttlock.netlist import emit_bench, parse_bench
from ttlock.service import app

client = TestClient(app)


@pytest.fixture(scope="module")
def locked_setup():
    n = random_netlist(60, 8, seed=30)
    bench = emit_bench(n)
    resp = client.post("/lock", json={"bench": bench, "key_size": 6, "seed": 4})
    assert resp.status_code == 200, resp.text
    return bench, resp.json()


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "schema_version": 1}


def test_lock_endpoint(locked_setup):
    bench, body = locked_setup
    assert body["schema_version"] == 1
    assert body["key_hex"].startswith("0x")
    assert body["summary"]["partitions_locked"] >= 1
    assert body["summary"]["area_delta_pct"] > 0
    locked = parse_bench(body["locked_bench"])
    assert locked.key_size == 6


def test_lock_endpoint_deterministic(locked_setup):
    bench, body = locked_setup
    again = client.post("/lock", json={"bench": bench, "key_size": 6, "seed": 4}).json()
    assert again == body


def test_lock_endpoint_parse_error():
    r = client.post("/lock", json={"bench": "garbage line\n", "key_size": 2})
    assert r.status_code == 400


def test_lock_endpoint_nothing_lockable():
    bench = "INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)\n"
    r = client.post("/lock", json={"bench": bench, "key_size": 1, "min_depth": 9})
    assert r.status_code == 422


def test_metrics_endpoint(locked_setup):
    bench, body = locked_setup
    r = client.post("/metrics", json={
        "golden_bench": bench,
        "locked_bench": body["locked_bench"],
        "key_hex": body["key_hex"],
        "random_wrong_keys": 4,
        "seed": 1,
    })
    assert r.status_code == 200, r.text
    rep = r.json()
    assert rep["composite"] == pytest.approx(
        (rep["t_index"] + rep["c_index"] + rep["f_index"]) / 3, abs=1e-3)
    assert rep["f_index"] > 0


def test_metrics_endpoint_correct_key_diagnostic(locked_setup):
    bench, body = locked_setup
    r = client.post("/metrics", json={
        "golden_bench": bench,
        "locked_bench": body["locked_bench"],
        "key_hex": body["key_hex"],
    })
    assert r.status_code == 200
    assert r.json()["f_index"] == 0.0


def test_metrics_endpoint_port_mismatch(locked_setup):
    bench, body = locked_setup
    other = emit_bench(random_netlist(20, 5, seed=9))
    r = client.post("/metrics", json={
        "golden_bench": other,
        "locked_bench": body["locked_bench"],
    })
    assert r.status_code == 409


def test_compose_endpoint():
    r = client.post("/metrics/compose", json={"f_index": 47.2, "t_index": 13.4, "c_index": 72.4})
    assert r.status_code == 200
    assert r.json()["composite"] == pytest.approx(44.33, abs=0.01)


def test_attack_endpoint_dip(locked_setup):
    bench, body = locked_setup
    r = client.post("/attack", json={
        "locked_bench": body["locked_bench"],
        "oracle_bench": bench,
        "attack": "dip",
        "true_key_hex": body["key_hex"],
    })
    assert r.status_code == 200, r.text
    res = r.json()["result"]
    assert res["attack"] == "dip"
    assert res["extra"]["surviving_keys"] >= 1
    assert "wall_time" not in res


def test_attack_endpoint_needs_oracle(locked_setup):
    _, body = locked_setup
    r = client.post("/attack", json={
        "locked_bench": body["locked_bench"],
        "attack": "dip",
    })
    assert r.status_code == 422


def test_attack_endpoint_sweep_without_oracle(locked_setup):
    _, body = locked_setup
    r = client.post("/attack", json={
        "locked_bench": body["locked_bench"],
        "attack": "sweep",
        "true_key_hex": body["key_hex"],
        "patterns": 64,
    })
    assert r.status_code == 200, r.text
    assert r.json()["result"]["attack"] == "sweep"


def test_stats_endpoint_rows():
    r = client.post("/stats", json={"rows": [{"n": 3, "k": 1, "d": 0}, {"n": 3, "k": 2, "d": 1}]})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert rows[0]["entries"] == 8 and rows[0]["f_count"] == 256
    assert rows[1]["entries"] == 48 and rows[1]["f_count"] == 2**48


def test_stats_endpoint_manifest(locked_setup):
    _, body = locked_setup
    r = client.post("/stats", json={"manifest": body["manifest"]})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert rows  # one row per locked partition output
    assert all(row["entries"] >= 2 for row in rows)
