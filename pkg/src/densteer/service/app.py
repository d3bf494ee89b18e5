"""HTTP service exposing the solvers.

Run with any ASGI server, e.g. ``uvicorn densteer.service.app:app``.
Typed solver errors map to 422 responses carrying the error class name.
"""

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import SteeringError
from ..experiment import ExperimentConfig, run_experiment
from ..linsys import GaussianPrior
from ..mi_control import alternate_midc, alternate_midc_general
from ..bridge import sbid_estimate, sbtvid_estimate, alternate_sb_general
from ..serialize import gaussian_from_doc, system_from_doc, problem_from_doc
from ..verification import run_all
from . import schemas

app = FastAPI(title="densteer", version=__version__)


@app.exception_handler(SteeringError)
async def steering_error_handler(request: Request, exc: SteeringError):
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def _policy_model(policy):
    return schemas.PolicyModel(
        P=[p.tolist() for p in policy.P],
        q=[v.tolist() for v in policy.q],
        Sigma=[s.tolist() for s in policy.Sigma],
    )


def _prior_model(prior):
    return schemas.PriorModel(
        mu=[v.tolist() for v in prior.mu],
        Sigma=[s.tolist() for s in prior.Sigma],
    )


def _iteration_models(steps, objective_shift=0.0):
    out = []
    by_iter = {}
    for s in steps:
        by_iter.setdefault(s.iteration, {})[s.kind] = s
    for i in sorted(by_iter):
        pair = by_iter[i]
        after_policy = pair.get("policy") or pair.get("bridge")
        after_prior = pair.get("prior") or pair.get("reference")
        last = after_prior or after_policy
        spectra = [
            np.linalg.eigvalsh(S).tolist() for S in last.prior.Sigma
        ]
        out.append(
            schemas.IterationModel(
                iteration=i,
                objective_after_policy=_finite(
                    after_policy.objective + objective_shift if after_policy else None
                ),
                objective_after_prior=_finite(
                    after_prior.objective + objective_shift if after_prior else None
                ),
                terminal_cov_error=float(last.terminal_cov_error),
                terminal_mean_error=float(last.terminal_mean_error),
                prior_spectra=spectra,
            )
        )
    return out


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": __version__}


@app.post("/solve/density-control", response_model=schemas.SolveResponse)
def solve_density_control(req: schemas.SolveRequest):
    prob = problem_from_doc(req.problem.model_dump(exclude_none=True))
    prior0 = GaussianPrior.identity(prob.sys.m, prob.sys.T)
    if prob.zero_means:
        trace = alternate_midc(prob, prior0, iters=req.iters, stop_rtol=req.stop_tol)
        policy, prior = trace.final_policy, trace.final_prior
        return schemas.SolveResponse(
            iterations=_iteration_models(trace.steps),
            policy=_policy_model(policy) if policy else None,
            prior=_prior_model(prior) if prior else None,
            mean_input=None,
            mean_trajectory=None,
            stopped_early=trace.stopped_early,
            failure=trace.failure,
        )
    general = alternate_midc_general(prob, prior0, iters=req.iters, stop_rtol=req.stop_tol)
    policy, prior = general.final_policy, general.final_prior
    # the deviation objective plus the deterministic mean-steering energy is
    # the full problem objective
    mean_cost = 0.5 * sum(float(u @ u) for u in general.steering.u_bar)
    return schemas.SolveResponse(
        iterations=_iteration_models(general.deviation.steps, mean_cost),
        policy=_policy_model(policy) if policy else None,
        prior=_prior_model(prior) if prior else None,
        mean_input=[u.tolist() for u in general.steering.u_bar],
        mean_trajectory=[m.tolist() for m in general.steering.mu_star],
        stopped_early=general.deviation.stopped_early,
        failure=general.deviation.failure,
    )


@app.post("/estimate/noise", response_model=schemas.EstimateResponse)
def estimate_noise(req: schemas.EstimateRequest):
    sys = system_from_doc(req.system.model_dump(exclude_none=True))
    ini = gaussian_from_doc(req.snapshots.initial.model_dump())
    fin = gaussian_from_doc(req.snapshots.final.model_dump())
    init_ref = gaussian_from_doc(req.init_ref.model_dump()) if req.init_ref else ini
    if req.method == "alg4":
        prior0 = GaussianPrior.identity(sys.m, sys.T)
        trace, _ = alternate_sb_general(
            sys, ini, fin, prior0, init_ref=init_ref, iters=req.iters
        )
        if trace.failure is not None:
            raise SteeringError(trace.failure["reason"])
        noise = [S.tolist() for S in trace.final_prior.Sigma]
        diagnostics = [
            {
                "iteration": s.iteration,
                "objective": _finite(s.objective),
                "terminal_cov_error": s.terminal_cov_error,
                "terminal_mean_error": s.terminal_mean_error,
            }
            for s in trace.steps
            if s.kind == "reference"
        ]
        return schemas.EstimateResponse(
            method="alg4", time_invariant=False, noise=noise, diagnostics=diagnostics
        )
    estimator = sbid_estimate if req.method == "sbid" else sbtvid_estimate
    est, _, diag = estimator(sys, ini, fin, init_ref=init_ref, iters=req.iters)
    return schemas.EstimateResponse(
        method=req.method,
        time_invariant=est.time_invariant,
        noise=[np.asarray(S).tolist() for S in est.expanded(sys.T)],
        diagnostics=diag,
    )


@app.post("/experiment/run", response_model=schemas.ExperimentResponse)
def experiment_run(req: schemas.ExperimentRequest):
    cfg = ExperimentConfig(
        alpha=req.alpha,
        horizon=req.horizon,
        state_dim=req.state_dim,
        particles=req.particles,
        trials=req.trials,
        alt_iters=req.alt_iters,
        base_seed=req.seed,
        methods=tuple(req.methods),
    )
    res = run_experiment(cfg)
    rows = [
        schemas.ExperimentRow(
            k=r["k"],
            method=r["method"],
            mean_rel_err=_finite(r["mean_rel_err"]),
            std_rel_err=_finite(r["std_rel_err"]),
            n_success=r["n_success"],
        )
        for r in res.rows
    ]
    metadata = dict(res.metadata)
    metadata["versions"] = {"densteer": __version__, "numpy": np.__version__}
    return schemas.ExperimentResponse(rows=rows, metadata=metadata)


@app.post("/verify/run", response_model=schemas.VerifyResponse)
def verify_run():
    checks = [
        schemas.CheckModel(name=c.name, passed=c.passed, detail=c.detail)
        for c in run_all()
    ]
    return schemas.VerifyResponse(passed=all(c.passed for c in checks), checks=checks)
