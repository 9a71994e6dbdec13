"""Command-line client for the scenario service.

All verbs are thin HTTP clients: by default they mount the service in-process,
or target a running `rislink serve` instance via --server. Exit codes: 0 on
success, 2 on configuration/validation problems, 1 on runtime failures.
"""

from __future__ import annotations

import warnings

import click
import httpx

from .scenario import load_config, write_records


def _client(server: str | None):
    if server is not None:
        return httpx.Client(base_url=server, timeout=600.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _load(config_path: str) -> dict:
    try:
        return load_config(config_path)
    except Exception as exc:
        click.echo(f"could not read config {config_path!r}: {exc}", err=True)
        raise SystemExit(2) from exc


def _print_issues(issues) -> None:
    for issue in issues:
        click.echo(f"  {issue.get('path', '<config>')}: {issue.get('message', '')}", err=True)


@click.group()
def main() -> None:
    """Link-level simulation and optimization for surface-assisted downlinks."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True),
              help="Output artifact path.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True, help="Artifact format.")
@click.option("--seed", type=int, default=None, help="Override the config's base seed.")
@click.option("--trials", type=int, default=None, help="Override the config's trial count.")
@click.option("--server", default=None, help="Service base URL; default runs in-process.")
def run(config_path, out, fmt, seed, trials, server) -> None:
    """Execute a scenario config and write the result table."""
    config = _load(config_path)
    if seed is not None:
        config["seed"] = seed
    if trials is not None:
        config["trials"] = trials
    try:
        with _client(server) as client:
            response = client.post("/run", json=config)
    except httpx.HTTPError as exc:
        click.echo(f"could not reach service: {exc}", err=True)
        raise SystemExit(1) from exc
    if response.status_code == 422:
        detail = response.json().get("detail", {})
        click.echo("invalid config:", err=True)
        if isinstance(detail, dict) and "issues" in detail:
            _print_issues(detail["issues"])
        else:
            click.echo(f"  {detail}", err=True)
        raise SystemExit(2)
    if response.status_code != 200:
        click.echo(f"run failed with status {response.status_code}: {response.text}", err=True)
        raise SystemExit(1)
    payload = response.json()
    try:
        write_records(payload["columns"], payload["rows"], fmt, out)
    except OSError as exc:
        click.echo(f"could not write {out!r}: {exc}", err=True)
        raise SystemExit(1) from exc
    click.echo(f"wrote {len(payload['rows'])} rows to {out}")


@main.command()
@click.option("--server", default=None, help="Service base URL; default runs in-process.")
def presets(server) -> None:
    """List available experiment presets."""
    try:
        with _client(server) as client:
            response = client.get("/presets")
    except httpx.HTTPError as exc:
        click.echo(f"could not reach service: {exc}", err=True)
        raise SystemExit(1) from exc
    if response.status_code != 200:
        click.echo(f"listing failed with status {response.status_code}", err=True)
        raise SystemExit(1)
    for info in response.json():
        sweeps = ", ".join(info["sweep_variables"])
        click.echo(f"{info['name']}: {info['description']} (sweep: {sweeps})")


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--server", default=None, help="Service base URL; default runs in-process.")
def validate(config_path, server) -> None:
    """Check a scenario config, reporting every schema violation."""
    config = _load(config_path)
    try:
        with _client(server) as client:
            response = client.post("/validate", json=config)
    except httpx.HTTPError as exc:
        click.echo(f"could not reach service: {exc}", err=True)
        raise SystemExit(1) from exc
    if response.status_code != 200:
        click.echo(f"validation call failed with status {response.status_code}", err=True)
        raise SystemExit(1)
    payload = response.json()
    if payload["valid"]:
        click.echo(f"{config_path}: valid")
        return
    click.echo(f"{config_path}: invalid", err=True)
    _print_issues(payload["issues"])
    raise SystemExit(2)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
