"""Command-line front end: lock / metrics / attack / stats / serve.

Thin client over the handler layer in api.py: each subcommand builds a
request model, invokes the handler in process, writes the artifacts, and
prints one JSON report to stdout. All randomness flows from --seed, so
identical invocations produce byte-identical outputs.

Exit codes: 0 ok, 1 parse error, 2 nothing lockable, 3 I/O error,
4 port mismatch, 5 attack limit violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import api

EXIT_IO = 3


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ttlock",
                                description="Partition-based truth-table logic locking toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("lock", help="lock a BENCH netlist")
    pl.add_argument("input", help="input .bench file")
    pl.add_argument("--key-size", type=int, required=True)
    pl.add_argument("--partition-size", type=int, default=None,
                    help="gates per partition (default: total gates / key size)")
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--aig", action="store_true",
                    help="rewrite to 2-input AND/NOT form before partitioning")
    pl.add_argument("--min-depth", type=int, default=2)
    pl.add_argument("--min-coverage", type=float, default=0.5)
    pl.add_argument("--dummy-max", type=int, default=4)
    pl.add_argument("-o", "--output", required=True, help="locked .bench output")
    pl.add_argument("--key-out", required=True, help="correct-key hex file")
    pl.add_argument("--manifest", required=True, help="lock manifest JSON file")

    pm = sub.add_parser("metrics", help="evaluate obfuscation quality indexes")
    pm.add_argument("golden", nargs="?", help="original .bench")
    pm.add_argument("locked", nargs="?", help="locked .bench")
    pm.add_argument("--key", help="key hex file (evaluated as-is; see --random-wrong-keys)")
    pm.add_argument("--random-wrong-keys", type=int, default=0,
                    help="sample this many keys (excluding --key when given; default 8)")
    pm.add_argument("--patterns", type=int, default=1000)
    pm.add_argument("--max-depth", default="auto",
                    help="scatter hop limit, or 'auto' for gates/key-size")
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--out", help="also write the report JSON here")
    pm.add_argument("--compose", nargs=3, type=float, metavar=("F", "T", "C"),
                    help="utility: combine three indexes into the composite score")

    pa = sub.add_parser("attack", help="run a key-recovery attack")
    pa.add_argument("locked", help="locked .bench")
    pa.add_argument("oracle", nargs="?", help="unlocked oracle .bench (brute/dip/hill)")
    pa.add_argument("--attack", required=True, choices=["brute", "dip", "hill", "sweep"])
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--true-key", help="key hex file for accuracy scoring")
    pa.add_argument("--max-dips", type=int, default=None)
    pa.add_argument("--iterations", type=int, default=2000)
    pa.add_argument("--restarts", type=int, default=4)
    pa.add_argument("--patterns", type=int, default=64)
    pa.add_argument("--threshold", type=float, default=0.0)
    pa.add_argument("--include-timing", action="store_true",
                    help="include wall_time in the report (breaks byte determinism)")
    pa.add_argument("--table", help="merge the result row into this corpus table JSON")

    ps = sub.add_parser("stats", help="keyed truth-table capacity figures")
    ps.add_argument("--n", type=int, help="original input count")
    ps.add_argument("--k", type=int, help="key bit count")
    ps.add_argument("--d", type=int, help="dummy input count")
    ps.add_argument("--from-manifest", help="per-partition rows from a lock manifest")

    pserve = sub.add_parser("serve", help="run the HTTP service")
    pserve.add_argument("--host", default="127.0.0.1")
    pserve.add_argument("--port", type=int, default=8000)
    return p


def _cmd_lock(args) -> int:
    req = api.LockRequest(
        bench=_read_text(args.input),
        key_size=args.key_size,
        seed=args.seed,
        partition_size=args.partition_size,
        aig=args.aig,
        min_depth=args.min_depth,
        min_coverage=args.min_coverage,
        dummy_max=args.dummy_max,
        name=Path(args.input).stem,
    )
    resp = api.handle_lock(req)
    _write_text(args.output, resp.locked_bench)
    _write_text(args.key_out, resp.key_hex + "\n")
    _write_text(args.manifest, _dump(resp.manifest))
    s = resp.summary
    print(
        f"locked {s.partitions_locked} partitions ({s.partitions_skipped} skipped), "
        f"gates {s.gates_original} -> {s.gates_locked}, "
        f"area {s.area_delta_pct:+.1f}% delay {s.delay_delta_pct:+.1f}% "
        f"power {s.power_delta_pct:+.1f}%",
        file=sys.stderr,
    )
    sys.stdout.write(_dump(resp.summary.model_dump() | {
        "schema_version": api.SCHEMA_VERSION,
        "kind": "lock_summary",
        "key_hex": resp.key_hex,
    }))
    return 0


def _cmd_metrics(args) -> int:
    if args.compose is not None:
        f, t, c = args.compose
        resp = api.handle_compose(api.ComposeRequest(f_index=f, t_index=t, c_index=c))
        sys.stdout.write(_dump(resp.model_dump()))
        return 0
    if not args.golden or not args.locked:
        raise _UsageError("metrics needs GOLDEN and LOCKED files (or --compose)")
    max_depth = None if args.max_depth == "auto" else int(args.max_depth)
    req = api.MetricsRequest(
        golden_bench=_read_text(args.golden),
        locked_bench=_read_text(args.locked),
        key_hex=_read_text(args.key).strip() if args.key else None,
        random_wrong_keys=args.random_wrong_keys,
        patterns=args.patterns,
        max_depth=max_depth,
        seed=args.seed,
    )
    resp = api.handle_metrics(req)
    text = _dump(resp.model_dump())
    if args.out:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return 0


def _cmd_attack(args) -> int:
    locked_text = _read_text(args.locked)
    req = api.AttackRequest(
        locked_bench=locked_text,
        oracle_bench=_read_text(args.oracle) if args.oracle else None,
        attack=args.attack,
        seed=args.seed,
        true_key_hex=_read_text(args.true_key).strip() if args.true_key else None,
        max_dips=args.max_dips,
        iterations=args.iterations,
        restarts=args.restarts,
        patterns=args.patterns,
        threshold=args.threshold,
        include_timing=args.include_timing,
        benchmark=Path(args.locked).stem,
    )
    resp = api.handle_attack(req)
    sys.stdout.write(_dump(resp.model_dump()))
    if args.table:
        table = {}
        path = Path(args.table)
        if path.exists():
            try:
                table = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise _IOFailure(f"cannot merge into {args.table}: {exc}") from exc
        table.setdefault(resp.benchmark, {})[args.attack] = resp.result
        _write_text(args.table, _dump(table))
    return 0


def _cmd_stats(args) -> int:
    rows = []
    manifest = None
    if args.from_manifest:
        manifest = json.loads(_read_text(args.from_manifest))
    elif args.n is not None and args.k is not None and args.d is not None:
        rows = [api.StatsRow(n=args.n, k=args.k, d=args.d)]
    else:
        raise _UsageError("stats needs --n/--k/--d or --from-manifest")
    resp = api.handle_stats(api.StatsRequest(rows=rows, manifest=manifest))
    sys.stdout.write(_dump(resp.model_dump()))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


class _UsageError(Exception):
    pass


_COMMANDS = {
    "lock": _cmd_lock,
    "metrics": _cmd_metrics,
    "attack": _cmd_attack,
    "stats": _cmd_stats,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary translation
        mapped = api.classify_error(exc)
        if mapped is None:
            raise
        exit_code, _ = mapped
        print(f"error: {exc}", file=sys.stderr)
        return exit_code


if __name__ == "__main__":
    sys.exit(main())
