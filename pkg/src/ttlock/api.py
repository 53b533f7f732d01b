"""Request/response models and handlers shared by the HTTP service and CLI.

Every handler is a pure function from a validated request model to a
response model; the FastAPI app and the command line are both thin clients
of this layer.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from .attacks import AttackLimitError, brute_force_keys, dip_attack, hill_climb, sweep_attack
from .locking import (
    LockError,
    NothingLockedError,
    complexity_stats,
    hex_to_key,
    key_to_hex,
    lock_netlist,
)
from .metrics import metrics_report, composite_score, sample_wrong_keys
from .netlist import BenchParseError, parse_bench, emit_bench
from .optimize import overhead_report
from .simulate import PortMismatchError

SCHEMA_VERSION = 1


class LockRequest(BaseModel):
    bench: str
    key_size: int = Field(ge=1)
    seed: int = 0
    partition_size: int | None = Field(default=None, ge=1)
    aig: bool = False
    min_depth: int = 2
    min_coverage: float = 0.5
    dummy_max: int = Field(default=4, ge=0)
    name: str = "top"
    overhead_patterns: int = Field(default=256, ge=1)


class LockSummary(BaseModel):
    partitions_locked: int
    partitions_skipped: int
    gates_original: int
    gates_locked: int
    area_delta_pct: float | None
    delay_delta_pct: float | None
    power_delta_pct: float | None


class LockResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str = "lock_response"
    locked_bench: str
    key_hex: str
    manifest: dict
    summary: LockSummary


def handle_lock(req: LockRequest) -> LockResponse:
    n = parse_bench(req.bench, name=req.name)
    res = lock_netlist(
        n,
        k_size=req.key_size,
        seed=req.seed,
        aig=req.aig,
        partition_size=req.partition_size,
        min_depth=req.min_depth,
        min_coverage=req.min_coverage,
        dummy_max=req.dummy_max,
    )
    over = overhead_report(n, res.netlist, patterns=req.overhead_patterns, seed=req.seed)
    summary = LockSummary(
        partitions_locked=res.manifest["partitions_locked"],
        partitions_skipped=res.manifest["partitions_skipped"],
        gates_original=n.gate_count,
        gates_locked=res.netlist.gate_count,
        area_delta_pct=over["area_delta_pct"],
        delay_delta_pct=over["delay_delta_pct"],
        power_delta_pct=over["power_delta_pct"],
    )
    manifest = dict(res.manifest)
    manifest["overhead"] = over
    return LockResponse(
        locked_bench=emit_bench(res.netlist),
        key_hex=res.key_hex,
        manifest=manifest,
        summary=summary,
    )


class MetricsRequest(BaseModel):
    golden_bench: str
    locked_bench: str
    key_hex: str | None = None
    random_wrong_keys: int = Field(default=0, ge=0)
    patterns: int = Field(default=1000, ge=1)
    max_depth: int | None = Field(default=None, ge=0)
    seed: int = 0


class MetricsResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str = "metrics_report"
    t_index: float
    c_index: float
    f_index: float
    composite: float
    max_depth: int
    p_total: int
    exhaustive: bool
    key_entry_nodes: list[int]
    covered_gates: int
    gates_total: int
    wrong_keys_used: int
    seed: int


def handle_metrics(req: MetricsRequest) -> MetricsResponse:
    golden = parse_bench(req.golden_bench, name="golden")
    locked = parse_bench(req.locked_bench, name="locked")
    k = locked.key_size
    if k == 0:
        raise PortMismatchError("locked netlist has no key inputs")
    given = hex_to_key(req.key_hex, k) if req.key_hex is not None else None
    if given is not None and req.random_wrong_keys > 0:
        keys = sample_wrong_keys(k, given, req.random_wrong_keys, req.seed)
    elif given is not None:
        keys = [given]  # diagnostic: evaluate exactly the supplied key
    else:
        keys = sample_wrong_keys(k, None, req.random_wrong_keys or 8, req.seed)
    rep = metrics_report(golden, locked, keys,
                         max_depth=req.max_depth, p_total=req.patterns, seed=req.seed)
    return MetricsResponse(
        t_index=round(rep.t_index, 4),
        c_index=round(rep.c_index, 4),
        f_index=round(rep.f_index, 4),
        composite=round(rep.composite, 4),
        max_depth=rep.max_depth,
        p_total=rep.p_total,
        exhaustive=rep.exhaustive,
        key_entry_nodes=list(rep.key_entry_nodes),
        covered_gates=rep.covered_gates,
        gates_total=rep.gates_total,
        wrong_keys_used=rep.wrong_keys_used,
        seed=rep.seed,
    )


class ComposeRequest(BaseModel):
    f_index: float
    t_index: float
    c_index: float


class ComposeResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str = "compose_result"
    composite: float


def handle_compose(req: ComposeRequest) -> ComposeResponse:
    return ComposeResponse(
        composite=round(composite_score(req.t_index, req.c_index, req.f_index), 4))


class AttackRequest(BaseModel):
    locked_bench: str
    oracle_bench: str | None = None
    attack: Literal["brute", "dip", "hill", "sweep"]
    seed: int = 0
    true_key_hex: str | None = None
    max_dips: int | None = Field(default=None, ge=0)
    iterations: int = Field(default=2000, ge=1)
    restarts: int = Field(default=4, ge=1)
    patterns: int = Field(default=64, ge=1)
    threshold: float = 0.0
    include_timing: bool = False
    benchmark: str = "bench"


class AttackResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str = "attack_result"
    benchmark: str
    result: dict


def handle_attack(req: AttackRequest) -> AttackResponse:
    locked = parse_bench(req.locked_bench, name="locked")
    oracle = parse_bench(req.oracle_bench, name="oracle") if req.oracle_bench else None
    true_key = hex_to_key(req.true_key_hex, locked.key_size) if req.true_key_hex else None
    if req.attack in ("brute", "dip", "hill") and oracle is None:
        raise AttackLimitError(f"attack {req.attack!r} needs an oracle netlist")
    if req.attack == "brute":
        keys = sorted(brute_force_keys(locked, oracle))
        result = {
            "attack": "brute",
            "equivalent_keys": [key_to_hex(tuple((v >> i) & 1 for i in range(locked.key_size)))
                                for v in keys[:256]],
            "equivalent_key_count": len(keys),
            "correct_key_in_set": (None if true_key is None
                                   else sum(b << i for i, b in enumerate(true_key)) in keys),
        }
    elif req.attack == "dip":
        res = dip_attack(locked, oracle, max_dips=req.max_dips, true_key=true_key)
        result = res.to_json(include_timing=req.include_timing)
    elif req.attack == "hill":
        res = hill_climb(locked, oracle, iterations=req.iterations, restarts=req.restarts,
                         patterns=req.patterns, seed=req.seed, true_key=true_key)
        result = res.to_json(include_timing=req.include_timing)
    else:
        res = sweep_attack(locked, true_key=true_key, threshold=req.threshold,
                           patterns=req.patterns, seed=req.seed)
        result = res.to_json(include_timing=req.include_timing)
    return AttackResponse(benchmark=req.benchmark, result=result)


class StatsRow(BaseModel):
    n: int = Field(ge=1)
    k: int = Field(ge=1)
    d: int = Field(ge=0)


class StatsRequest(BaseModel):
    rows: list[StatsRow] = Field(default_factory=list)
    manifest: dict | None = None


class StatsResultRow(BaseModel):
    n: int
    k: int
    d: int
    entries: int
    f_count: int | None
    f_count_log2: int
    partition: int | None = None
    output: int | None = None


class StatsResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str = "stats_report"
    rows: list[StatsResultRow]


def handle_stats(req: StatsRequest) -> StatsResponse:
    rows: list[StatsResultRow] = []
    for r in req.rows:
        st = complexity_stats(r.n, r.k, r.d)
        rows.append(StatsResultRow(n=st.n, k=st.k, d=st.d, entries=st.entries,
                                   f_count=st.f_count, f_count_log2=st.f_count_log2))
    if req.manifest is not None:
        for part in req.manifest.get("partitions", []):
            if not part.get("locked"):
                continue
            k = part["key_width"]
            d = len(part.get("dummy_nets", []))
            for t, arity in enumerate(part.get("cone_arities", [])):
                st = complexity_stats(max(1, arity), k, d)
                rows.append(StatsResultRow(
                    n=st.n, k=st.k, d=st.d, entries=st.entries,
                    f_count=st.f_count, f_count_log2=st.f_count_log2,
                    partition=part["index"], output=t,
                ))
    return StatsResponse(rows=rows)


#: exception type -> stable CLI exit code / HTTP status mapping
ERROR_CODES: list[tuple[type[Exception], int, int]] = [
    (BenchParseError, 1, 400),
    (NothingLockedError, 2, 422),
    (PortMismatchError, 4, 409),
    (AttackLimitError, 5, 422),
    (LockError, 2, 422),
]


def classify_error(exc: Exception) -> tuple[int, int] | None:
    for etype, exit_code, http in ERROR_CODES:
        if isinstance(exc, etype):
            return exit_code, http
    return None
