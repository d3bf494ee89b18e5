"""Command-line client for the densteer service.

Each subcommand builds a request, sends it to the service and writes the
response to disk.  Without ``--server`` the service app runs in-process, so
no separate server is needed; outputs are byte-identical across runs for
identical inputs either way.
"""

import json
import pathlib
import sys

import click

from .serialize import canonical_json, experiment_csv, noise_csv

DEFAULT_TIMEOUT = 600.0


def _client(server):
    import httpx

    if server:
        return httpx.Client(base_url=server, timeout=DEFAULT_TIMEOUT)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(client, path, payload):
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            body = resp.json()
            msg = f"{body.get('error', resp.status_code)}: {body.get('detail', '')}"
        except Exception:
            msg = f"HTTP {resp.status_code}"
        raise click.ClickException(msg)
    return resp.json()


def _write(path, text):
    # bytes, so CSV line endings survive platform newline translation
    pathlib.Path(path).write_bytes(text.encode("utf-8"))
    click.echo(f"wrote {path}")


@click.group()
def main():
    """Density steering, bridge solvers and the estimation benchmark."""


@main.command("solve-midc")
@click.option("--problem", "problem_path", required=True, type=click.Path(exists=True),
              help="JSON problem document (system + boundary marginals).")
@click.option("--iters", default=10, show_default=True, help="Alternation iterations.")
@click.option("--stop-tol", default=None, type=float,
              help="Optional early-stop threshold on the relative prior change.")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Output JSON path (default: stdout summary only).")
@click.option("--server", default=None, help="Base URL of a running service.")
def solve_midc(problem_path, iters, stop_tol, out_path, server):
    """Solve a density-steering problem by alternating optimization."""
    problem = json.loads(pathlib.Path(problem_path).read_text())
    payload = {"problem": problem, "iters": iters}
    if stop_tol is not None:
        payload["stop_tol"] = stop_tol
    with _client(server) as client:
        data = _post(client, "/solve/density-control", payload)
    if data.get("failure"):
        click.echo(f"stopped: {data['failure']}")
    rows = data["iterations"]
    click.echo(f"{'iter':>4} {'J (policy step)':>18} {'J (prior step)':>18} {'cov err':>12} {'mean err':>12}")
    for it in rows:
        jp = it["objective_after_policy"]
        jr = it["objective_after_prior"]
        click.echo(
            f"{it['iteration']:>4} "
            f"{jp if jp is not None else float('nan'):>18.12g} "
            f"{jr if jr is not None else float('nan'):>18.12g} "
            f"{it['terminal_cov_error']:>12.3e} {it['terminal_mean_error']:>12.3e}"
        )
    if out_path:
        _write(out_path, canonical_json(data))


@main.command("estimate-noise")
@click.option("--system", "system_path", required=True, type=click.Path(exists=True),
              help="JSON system document.")
@click.option("--snapshots", "snapshots_path", required=True, type=click.Path(exists=True),
              help="JSON document with initial/final Gaussian snapshots.")
@click.option("--method", required=True, type=click.Choice(["alg4", "sbid", "sbtvid"]))
@click.option("--iters", default=10, show_default=True)
@click.option("--out-prefix", default="noise_estimate",
              help="Prefix for the CSV and JSON outputs.")
@click.option("--server", default=None, help="Base URL of a running service.")
def estimate_noise(system_path, snapshots_path, method, iters, out_prefix, server):
    """Estimate step-noise covariances from two snapshots."""
    payload = {
        "system": json.loads(pathlib.Path(system_path).read_text()),
        "snapshots": json.loads(pathlib.Path(snapshots_path).read_text()),
        "method": method,
        "iters": iters,
    }
    with _client(server) as client:
        data = _post(client, "/estimate/noise", payload)
    _write(f"{out_prefix}.csv", noise_csv(data["noise"]))
    _write(f"{out_prefix}.json", canonical_json(data))


@main.command("experiment")
@click.option("--alpha", required=True, type=float, help="True-noise magnitude.")
@click.option("--trials", default=10, show_default=True)
@click.option("--particles", default=100, show_default=True)
@click.option("--horizon", default=10, show_default=True)
@click.option("--state-dim", default=2, show_default=True)
@click.option("--alt-iters", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", default=".", type=click.Path(), show_default=True)
@click.option("--server", default=None, help="Base URL of a running service.")
def experiment(alpha, trials, particles, horizon, state_dim, alt_iters, seed, out_dir, server):
    """Run the estimation benchmark and write one CSV per alpha plus metadata."""
    payload = {
        "alpha": alpha,
        "trials": trials,
        "particles": particles,
        "horizon": horizon,
        "state_dim": state_dim,
        "alt_iters": alt_iters,
        "seed": seed,
    }
    with _client(server) as client:
        data = _post(client, "/experiment/run", payload)
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tag = format(alpha, "g")
    _write(out / f"relative_errors_alpha_{tag}.csv", experiment_csv(data["rows"]))
    _write(out / f"experiment_metadata_alpha_{tag}.json", canonical_json(data["metadata"]))


@main.command("verify")
@click.option("--server", default=None, help="Base URL of a running service.")
def verify(server):
    """Run the invariant/property suite and print pass/fail per property."""
    with _client(server) as client:
        data = _post(client, "/verify/run", {})
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"[{status}] {check['name']}: {check['detail']}")
    if not data["passed"]:
        sys.exit(1)
    click.echo("all checks passed")


if __name__ == "__main__":
    main()
