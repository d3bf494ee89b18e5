"""Path-space view: Markov Gaussian processes, bridge objectives, and
reference refinement.

The bridge alternation reuses the density-control closed forms step for step;
this module adds the process-level bookkeeping (path KL, innovation-energy
potential) and the snapshot-based noise-covariance estimators built on plain
bridges without the potential term.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    AssumptionViolated,
    DimensionMismatch,
    NotPD,
    NotPSD,
    RankDeficientB,
    SingularGramian,
)
from .gaussian import (
    Gaussian,
    kl_gaussian_on_support,
    pseudo_inverse,
    spd_sqrt,
    sym_eigh,
    sym_inverse,
    symmetrize,
)
from .linsys import (
    AffinePolicy,
    GaussianPrior,
    LinearSystem,
    MomentTrajectory,
    propagate_moments,
    reachability_gramian,
    state_transition,
)
from .maxent import me_density_policy
from .mi_control import (
    DensitySteeringProblem,
    mean_steering,
    mi_policy_for_prior,
    mi_prior_for_policy,
    shift_policy,
)

__all__ = [
    "ProcessDistribution",
    "Trajectory",
    "NoiseEstimate",
    "reference_process",
    "controlled_process",
    "process_marginals",
    "potential_v",
    "expected_potential",
    "kl_process",
    "sb_objective",
    "BridgeStep",
    "BridgeTrace",
    "alternate_sb",
    "alternate_sb_general",
    "sbid_estimate",
    "sbtvid_estimate",
]


@dataclass(frozen=True)
class ProcessDistribution:
    """Markov Gaussian path law: x_{k+1} | x_k ~ N(D_k x_k + c_k, N_k)."""

    initial: Gaussian
    transitions: tuple
    offsets: tuple
    noise_covs: tuple

    def __post_init__(self):
        n = self.initial.dim
        D = tuple(np.asarray(d, dtype=float) for d in self.transitions)
        c = tuple(np.asarray(v, dtype=float).reshape(n) for v in self.offsets)
        N = tuple(symmetrize(np.asarray(s, dtype=float)) for s in self.noise_covs)
        if not (len(D) == len(c) == len(N)):
            raise DimensionMismatch("process sequences must share one length")
        for d, s in zip(D, N):
            if d.shape != (n, n) or s.shape != (n, n):
                raise DimensionMismatch("inconsistent process matrix shapes")
            if np.linalg.eigvalsh(s).min() < -DEFAULT.psd_atol:
                raise NotPSD("step noise covariance must be PSD")
        object.__setattr__(self, "transitions", D)
        object.__setattr__(self, "offsets", c)
        object.__setattr__(self, "noise_covs", N)

    @property
    def T(self):
        return len(self.transitions)

    @property
    def n(self):
        return self.initial.dim


@dataclass(frozen=True)
class Trajectory:
    """One state path x_0..x_T."""

    states: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "states", np.asarray(self.states, dtype=float))


@dataclass(frozen=True)
class NoiseEstimate:
    """Estimated input-noise covariances; one entry broadcast when time-invariant."""

    sigmas: tuple
    time_invariant: bool

    def at(self, k):
        return self.sigmas[0] if self.time_invariant else self.sigmas[k]

    def expanded(self, T):
        return [self.at(k) for k in range(T)]


def reference_process(sys: LinearSystem, prior: GaussianPrior, init: Gaussian):
    """Uncontrolled process driven by prior noise: drift A_k x + B_k mu_k,
    step noise B_k Sigma_k B_k'."""
    if prior.T != sys.T or prior.m != sys.m or init.dim != sys.n:
        raise DimensionMismatch("prior/init dimensions do not match the system")
    return ProcessDistribution(
        init,
        tuple(sys.A),
        tuple(sys.B[k] @ prior.mu[k] for k in range(sys.T)),
        tuple(symmetrize(sys.B[k] @ prior.Sigma[k] @ sys.B[k].T) for k in range(sys.T)),
    )


def controlled_process(sys: LinearSystem, policy: AffinePolicy, init: Gaussian):
    """Closed-loop process: drift (A_k + B_k P_k) x + B_k q_k, step noise
    B_k Sigma_k B_k'."""
    if policy.T != sys.T or policy.m != sys.m or policy.n != sys.n or init.dim != sys.n:
        raise DimensionMismatch("policy/init dimensions do not match the system")
    return ProcessDistribution(
        init,
        tuple(sys.A[k] + sys.B[k] @ policy.P[k] for k in range(sys.T)),
        tuple(sys.B[k] @ policy.q[k] for k in range(sys.T)),
        tuple(symmetrize(sys.B[k] @ policy.Sigma[k] @ sys.B[k].T) for k in range(sys.T)),
    )


def process_marginals(proc: ProcessDistribution):
    """Exact marginal means/covariances of a Markov Gaussian process."""
    means = [proc.initial.mean]
    covs = [symmetrize(proc.initial.cov)]
    for D, c, N in zip(proc.transitions, proc.offsets, proc.noise_covs):
        means.append(D @ means[-1] + c)
        covs.append(symmetrize(D @ covs[-1] @ D.T + N))
    return MomentTrajectory(tuple(means), tuple(covs))


def potential_v(sys: LinearSystem, traj: Trajectory):
    """Innovation energy sum_k ||B_k^+ (x_{k+1} - A_k x_k)||^2 / 2."""
    x = traj.states
    if x.shape != (sys.T + 1, sys.n):
        raise DimensionMismatch(f"trajectory must be {(sys.T + 1, sys.n)}, got {x.shape}")
    total = 0.0
    for k in range(sys.T):
        innov = pseudo_inverse(sys.B[k]) @ (x[k + 1] - sys.A[k] @ x[k])
        total += 0.5 * float(innov @ innov)
    return total


def expected_potential(sys: LinearSystem, proc: ProcessDistribution):
    """Closed-form E[V] under the process: per step, a quadratic form in the
    drift mismatch (D_k - A_k) plus the mapped step noise."""
    if proc.T != sys.T or proc.n != sys.n:
        raise DimensionMismatch("process does not match the system")
    marg = process_marginals(proc)
    total = 0.0
    for k in range(sys.T):
        Bp = pseudo_inverse(sys.B[k])
        Delta = proc.transitions[k] - sys.A[k]
        mean_innov = Bp @ (Delta @ marg.means[k] + proc.offsets[k])
        spread = Delta @ marg.covs[k] @ Delta.T + proc.noise_covs[k]
        total += 0.5 * (float(mean_innov @ mean_innov) + float(np.trace(Bp @ spread @ Bp.T)))
    return total


def kl_process(P: ProcessDistribution, Q: ProcessDistribution, tols: Tolerances = DEFAULT):
    """Path KL using the Markov chain rule:
    KL(P_0 || Q_0) + sum_k E_{P_k}[ KL(P_{k+1|k} || Q_{k+1|k}) ].

    Each conditional term is evaluated on the support of Q's step noise; drift
    or noise mass outside that support makes the value +inf.
    """
    if P.T != Q.T or P.n != Q.n:
        raise DimensionMismatch("processes must share horizon and dimension")
    total = kl_gaussian_on_support(P.initial.mean, P.initial.cov, Q.initial.mean, Q.initial.cov, tols)
    if total == math.inf:
        return math.inf
    marg = process_marginals(P)
    for k in range(P.T):
        Np, Nq = P.noise_covs[k], Q.noise_covs[k]
        Delta = P.transitions[k] - Q.transitions[k]
        dc = P.offsets[k] - Q.offsets[k]
        mean_k, cov_k = marg.means[k], marg.covs[k]

        lam, V = sym_eigh(Nq)
        lmax = max(lam.max(initial=0.0), 0.0)
        cutoff = tols.rank_rtol * max(lmax, np.finfo(float).tiny)
        keep = lam > cutoff
        r = int(keep.sum())
        d_mean = Delta @ mean_k + dc

        # leakage measured in the orthogonal complement of Im(Nq), where
        # eigenbasis error enters quadratically and traces are exactly >= 0
        W = V[:, ~keep]
        if W.shape[1]:
            if float(np.linalg.norm(W.T @ d_mean)) > tols.support_rtol * max(
                1.0, float(np.linalg.norm(d_mean))
            ):
                return math.inf
            MD = W.T @ Delta
            spread_scale = max(1.0, abs(float(np.trace(Delta @ cov_k @ Delta.T))))
            if float(np.trace(MD @ cov_k @ MD.T)) > tols.support_rtol * spread_scale:
                return math.inf
            noise_scale = max(1.0, abs(float(np.trace(Np))))
            if float(np.trace(W.T @ Np @ W)) > tols.support_rtol * noise_scale:
                return math.inf
        if r == 0:
            continue
        U = V[:, keep]
        lam_s = lam[keep]

        Np_s = symmetrize(U.T @ Np @ U)
        lp = np.linalg.eigvalsh(Np_s)
        if lp.min() <= tols.rank_rtol * max(lp.max(initial=0.0), np.finfo(float).tiny):
            return math.inf
        trace_term = float((np.diag(Np_s) / lam_s).sum())
        Us = U / lam_s  # columns scaled: U diag(1/lam) implicitly
        Nq_pinv = Us @ U.T
        quad = float(d_mean @ Nq_pinv @ d_mean) + float(
            np.trace(Delta.T @ Nq_pinv @ Delta @ cov_k)
        )
        logdet_q = float(np.log(lam_s).sum())
        logdet_p = float(np.log(lp).sum())
        total += 0.5 * (trace_term + quad - r + logdet_q - logdet_p)
    return total


def sb_objective(P: ProcessDistribution, Q: ProcessDistribution, sys: LinearSystem,
                 tols: Tolerances = DEFAULT):
    """KL(P || Q) plus the expected innovation-energy potential of P."""
    kl = kl_process(P, Q, tols)
    if kl == math.inf:
        return math.inf
    return kl + expected_potential(sys, P)


@dataclass(frozen=True)
class BridgeStep:
    kind: str  # "bridge" or "reference"
    iteration: int
    policy: AffinePolicy
    prior: GaussianPrior
    controlled: ProcessDistribution
    reference: ProcessDistribution
    objective: float
    terminal_cov_error: float
    terminal_mean_error: float


@dataclass
class BridgeTrace:
    steps: list
    failure: dict | None = None
    stopped_early: bool = False

    def objectives(self):
        return [s.objective for s in self.steps]

    def prior_iterates(self):
        return [s.prior for s in self.steps if s.kind == "reference"]

    @property
    def final_prior(self):
        return self.steps[-1].prior if self.steps else None

    @property
    def final_policy(self):
        return self.steps[-1].policy if self.steps else None


def _check_full_column_rank(sys, tols):
    if not sys.input_full_column_rank(tols):
        raise RankDeficientB("every input matrix must have full column rank")


def alternate_sb(
    sys: LinearSystem,
    Sigma_ini,
    Sigma_fin,
    prior0: GaussianPrior,
    init_ref: Gaussian | None = None,
    iters: int = 10,
    tols: Tolerances = DEFAULT,
    stop_rtol: float | None = None,
):
    """Alternate the bridge step (optimal controlled process for the current
    reference) and the refinement step (optimal reference for the current
    controlled process), recording the bridge objective after each half-step.

    The produced policy/prior iterates are exactly those of the
    density-control alternation; this driver adds the path-space objects.
    """
    _check_full_column_rank(sys, tols)
    n = sys.n
    prob = DensitySteeringProblem(sys, np.zeros(n), Sigma_ini, np.zeros(n), Sigma_fin)
    if init_ref is None:
        init_ref = Gaussian(np.zeros(n), prob.Sigma_ini)
    trace = BridgeTrace(steps=[])
    prior = prior0
    reference = reference_process(sys, prior, init_ref)
    start = Gaussian(np.zeros(n), prob.Sigma_ini)
    for i in range(iters):
        try:
            policy = mi_policy_for_prior(prob, prior, tols)
        except AssumptionViolated as exc:
            trace.failure = {"iteration": i, "reason": str(exc)}
            return trace
        controlled = controlled_process(sys, policy, start)
        marg = process_marginals(controlled)
        cov_err = float(
            np.linalg.norm(marg.covs[-1] - prob.Sigma_fin) / np.linalg.norm(prob.Sigma_fin)
        )
        mean_err = float(np.linalg.norm(marg.means[-1]))
        obj = sb_objective(controlled, reference, sys, tols)
        trace.steps.append(
            BridgeStep(
                "bridge", i, policy, prior, controlled, reference, obj, cov_err, mean_err,
            )
        )
        if obj == math.inf:
            trace.failure = {"iteration": i, "reason": "objective_infinite"}
            return trace
        new_prior = mi_prior_for_policy(prob, policy, tols)
        new_reference = reference_process(sys, new_prior, init_ref)
        trace.steps.append(
            BridgeStep(
                "reference", i, policy, new_prior, controlled, new_reference,
                sb_objective(controlled, new_reference, sys, tols), cov_err, mean_err,
            )
        )
        if stop_rtol is not None and _priors_close(prior, new_prior, stop_rtol):
            trace.stopped_early = True
            return trace
        prior = new_prior
        reference = new_reference
    return trace


def _priors_close(a, b, rtol):
    for Sa, Sb in zip(a.Sigma, b.Sigma):
        if np.linalg.norm(Sb - Sa) > rtol * max(np.linalg.norm(Sa), np.finfo(float).tiny):
            return False
    return True


def alternate_sb_general(
    sys: LinearSystem,
    ini: Gaussian,
    fin: Gaussian,
    prior0: GaussianPrior,
    init_ref: Gaussian | None = None,
    iters: int = 10,
    tols: Tolerances = DEFAULT,
    stop_rtol: float | None = None,
):
    """Nonzero-mean bridge: the deterministic least-energy input steers the
    means, the zero-mean alternation handles the covariances, and all path
    objects are shifted accordingly (prior means become the steering input).
    """
    _check_full_column_rank(sys, tols)
    prob = DensitySteeringProblem(sys, ini.mean, ini.cov, fin.mean, fin.cov)
    steering = mean_steering(prob, tols)
    if init_ref is None:
        init_ref = ini
    dev_prob = prob.zero_mean_version()
    trace = BridgeTrace(steps=[])
    prior = prior0
    shifted_prior = prior.with_means(steering.u_bar)
    reference = reference_process(sys, shifted_prior, init_ref)
    start = Gaussian(ini.mean, ini.cov)
    for i in range(iters):
        try:
            dev_policy = mi_policy_for_prior(dev_prob, prior, tols)
        except AssumptionViolated as exc:
            trace.failure = {"iteration": i, "reason": str(exc)}
            return trace, steering
        policy = shift_policy(dev_policy, steering)
        controlled = controlled_process(sys, policy, start)
        marg = process_marginals(controlled)
        cov_err = float(
            np.linalg.norm(marg.covs[-1] - prob.Sigma_fin) / np.linalg.norm(prob.Sigma_fin)
        )
        mean_err = float(np.linalg.norm(marg.means[-1] - prob.mu_fin))
        obj = sb_objective(controlled, reference, sys, tols)
        trace.steps.append(
            BridgeStep(
                "bridge", i, policy, shifted_prior, controlled, reference, obj,
                cov_err, mean_err,
            )
        )
        if obj == math.inf:
            trace.failure = {"iteration": i, "reason": "objective_infinite"}
            return trace, steering
        new_prior = mi_prior_for_policy(dev_prob, dev_policy, tols)
        new_shifted = new_prior.with_means(steering.u_bar)
        new_reference = reference_process(sys, new_shifted, init_ref)
        trace.steps.append(
            BridgeStep(
                "reference", i, policy, new_shifted, controlled, new_reference,
                sb_objective(controlled, new_reference, sys, tols), cov_err, mean_err,
            )
        )
        if stop_rtol is not None and _priors_close(prior, new_prior, stop_rtol):
            trace.stopped_early = True
            return trace, steering
        prior = new_prior
        shifted_prior = new_shifted
        reference = new_reference
    return trace, steering


def _weighted_mean_input(sys, theta_seq, mu_ini, mu_fin, tols):
    """Least-energy noise mean (weighted by theta^{-1}) steering the mean:
    computed as the least-norm input of the theta^{1/2}-scaled system."""
    halves = [spd_sqrt(theta_seq[k], tols) for k in range(sys.T)]
    Beff = [sys.B[k] @ halves[k] for k in range(sys.T)]
    G = reachability_gramian(sys, sys.T, 0, Beff)
    G_inv = sym_inverse(G, tols)
    if G_inv is None:
        raise SingularGramian("reachability Gramian under the scaled input is singular")
    residual = mu_fin - state_transition(sys, sys.T, 0) @ mu_ini
    w = G_inv @ residual
    v = [Beff[k].T @ state_transition(sys, sys.T, k + 1).T @ w for k in range(sys.T)]
    return halves, Beff, v


def _plain_bridge_refinement(
    sys, ini, fin, theta_seq, tols
):
    """One bridge + moment-match pass for the potential-free estimators.

    Solves the plain bridge between the snapshots against the reference with
    noise N(theta^{1/2} v_k, theta_k) and returns the per-step matched second
    moments of the innovations about the reference noise mean.
    """
    halves, Beff, v = _weighted_mean_input(sys, theta_seq, ini.mean, fin.mean, tols)
    scaled_sys = sys.with_input(Beff)
    policy = me_density_policy(sys, Beff, ini.cov, fin.cov, tols)
    # tie the controlled mean path to the steered one
    mu = [ini.mean]
    for k in range(sys.T):
        mu.append(sys.A[k] @ mu[-1] + Beff[k] @ v[k])
    q = tuple(v[k] - policy.P[k] @ mu[k] for k in range(sys.T))
    shifted = AffinePolicy(policy.P, q, policy.Sigma)
    moments = propagate_moments(scaled_sys, shifted, ini)
    matched = []
    for k in range(sys.T):
        Pk = policy.P[k]
        resid = Pk @ moments.means[k] + q[k] - v[k]
        core = policy.Sigma[k] + Pk @ moments.covs[k] @ Pk.T + np.outer(resid, resid)
        matched.append(symmetrize(halves[k] @ core @ halves[k]))
    cov_err = float(np.linalg.norm(moments.covs[-1] - fin.cov) / np.linalg.norm(fin.cov))
    mean_err = float(np.linalg.norm(moments.means[-1] - fin.mean))
    return matched, cov_err, mean_err


def _estimate_noise(sys, ini, fin, theta0, iters, time_invariant, tols):
    _check_full_column_rank(sys, tols)
    m = sys.m
    if theta0 is None:
        theta0 = np.eye(m)
    if time_invariant:
        theta_seq = [symmetrize(np.asarray(theta0, dtype=float))] * sys.T
    else:
        t0 = np.asarray(theta0, dtype=float)
        theta_seq = (
            [symmetrize(t0)] * sys.T
            if t0.ndim == 2
            else [symmetrize(np.asarray(t, dtype=float)) for t in theta0]
        )
    if len(theta_seq) != sys.T:
        raise DimensionMismatch("theta0 must be one matrix or a length-T sequence")
    for t in theta_seq:
        if np.linalg.eigvalsh(t).min() <= tols.pd_atol:
            raise NotPD("theta0 must be strictly positive definite")
    history = []
    diag = []
    for it in range(iters):
        try:
            matched, cov_err, mean_err = _plain_bridge_refinement(
                sys, ini, fin, theta_seq, tols
            )
        except AssumptionViolated:
            # The steering construction degenerates exactly when the current
            # reference already explains both snapshots (required terminal
            # weight is zero), i.e. the refinement has converged.
            if it == 0:
                raise
            diag.append({"stopped": "reference_explains_snapshots", "iteration": it})
            break
        if time_invariant:
            mean_theta = symmetrize(sum(matched) / sys.T)
            theta_seq = [mean_theta] * sys.T
            history.append(mean_theta)
        else:
            theta_seq = matched
            history.append(list(matched))
        diag.append({"terminal_cov_error": cov_err, "terminal_mean_error": mean_err})
    if time_invariant:
        est = NoiseEstimate((theta_seq[0],), True)
    else:
        est = NoiseEstimate(tuple(theta_seq), False)
    return est, history, diag


def sbid_estimate(
    sys: LinearSystem,
    ini: Gaussian,
    fin: Gaussian,
    theta0=None,
    init_ref: Gaussian | None = None,
    iters: int = 10,
    tols: Tolerances = DEFAULT,
):
    """Time-invariant noise covariance from two snapshots via plain bridges.

    Alternates (i) solving the potential-free bridge against the reference
    driven by N(theta-weighted steering mean, theta) and (ii) replacing theta
    by the time-averaged matched second moment of the bridge innovations.

    ``init_ref`` only shifts the bridge objective by a constant and does not
    affect the estimate; it is accepted for interface symmetry.
    """
    del init_ref
    return _estimate_noise(sys, ini, fin, theta0, iters, True, tols)


def sbtvid_estimate(
    sys: LinearSystem,
    ini: Gaussian,
    fin: Gaussian,
    theta0=None,
    init_ref: Gaussian | None = None,
    iters: int = 10,
    tols: Tolerances = DEFAULT,
):
    """Time-varying variant of :func:`sbid_estimate`: the matched second
    moments are kept per step instead of time-averaged."""
    del init_ref
    return _estimate_noise(sys, ini, fin, theta0, iters, False, tols)
