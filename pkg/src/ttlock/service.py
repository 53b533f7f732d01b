"""FastAPI app exposing the locking toolkit over HTTP."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import api

app = FastAPI(
    title="ttlock",
    description="Partition-based truth-table logic locking: lock, evaluate, attack.",
    version="0.1.0",
)


def _run(handler, req):
    try:
        return handler(req)
    except Exception as exc:  # noqa: BLE001 - boundary translation
        mapped = api.classify_error(exc)
        if mapped is None:
            raise
        _, http = mapped
        raise HTTPException(status_code=http, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "schema_version": api.SCHEMA_VERSION}


@app.post("/lock", response_model=api.LockResponse)
def lock(req: api.LockRequest) -> api.LockResponse:
    return _run(api.handle_lock, req)


@app.post("/metrics", response_model=api.MetricsResponse)
def metrics(req: api.MetricsRequest) -> api.MetricsResponse:
    return _run(api.handle_metrics, req)


@app.post("/metrics/compose", response_model=api.ComposeResponse)
def compose(req: api.ComposeRequest) -> api.ComposeResponse:
    try:
        return api.handle_compose(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.post("/attack", response_model=api.AttackResponse)
def attack(req: api.AttackRequest) -> api.AttackResponse:
    return _run(api.handle_attack, req)


@app.post("/stats", response_model=api.StatsResponse)
def stats(req: api.StatsRequest) -> api.StatsResponse:
    return _run(api.handle_stats, req)
