"""HTTP facade over the scenario engine.

Endpoints: GET /health, GET /presets, POST /validate (raw config in, field-path
issues out), POST /run (validated config in, result table out). The CLI talks
to this app in-process by default, or over the network against `rislink serve`.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .scenario import PRESET_INFO, result_columns, run, to_records, validate_config

app = FastAPI(
    title="rislink",
    version=__version__,
    description="Link-level simulation and optimization for surface-assisted downlinks.",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/presets")
def presets() -> list[dict]:
    return [dict(info) for info in PRESET_INFO]


@app.post("/validate")
def validate(config: dict) -> dict:
    ok, issues = validate_config(config)
    return {"valid": ok, "issues": issues}


@app.post("/run")
def run_scenario(config: dict) -> dict:
    ok, issues = validate_config(config)
    if not ok:
        raise HTTPException(status_code=422, detail={"issues": issues})
    results = run(config)
    return {"columns": result_columns(results), "rows": to_records(results)}
