"""Mutual-information regularized density control.

Alternating optimization between an affine Gaussian feedback policy and a
Gaussian feedforward prior: the policy step reuses the covariance-steering
machinery under an effective input matrix, the prior step is a closed-form
moment match.  The nonzero-mean boundary case splits off a deterministic
least-energy mean-steering input.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    AssumptionViolated,
    DimensionMismatch,
    InfeasibleRiccati,
    NotPD,
    SingularA,
    SingularF,
    SingularGramian,
)
from .gaussian import Gaussian, pd_logdet, sym_eigh, sym_inverse, symmetrize
from .linsys import (
    AffinePolicy,
    GaussianPrior,
    LinearSystem,
    propagate_moments,
    reachability_gramian,
    state_transition,
)
from .maxent import me_terminal_weight, riccati_with_prior

__all__ = [
    "DensitySteeringProblem",
    "MeanSteering",
    "AlternationStep",
    "AlternationTrace",
    "GeneralAlternation",
    "NonzeroMeanPolicyAux",
    "reduce_weighted_cost",
    "effective_input_matrix",
    "mi_policy_for_prior",
    "mi_prior_for_policy",
    "objective_j",
    "alternate_midc",
    "mean_steering",
    "alternate_midc_general",
    "mi_policy_nonzero_mean_prior",
]


@dataclass(frozen=True)
class DensitySteeringProblem:
    """Steer N(mu_ini, Sigma_ini) to N(mu_fin, Sigma_fin) through the system."""

    sys: LinearSystem
    mu_ini: np.ndarray
    Sigma_ini: np.ndarray
    mu_fin: np.ndarray
    Sigma_fin: np.ndarray

    def __post_init__(self):
        n = self.sys.n
        mu_ini = np.asarray(self.mu_ini, dtype=float).reshape(n)
        mu_fin = np.asarray(self.mu_fin, dtype=float).reshape(n)
        Sigma_ini = symmetrize(np.asarray(self.Sigma_ini, dtype=float))
        Sigma_fin = symmetrize(np.asarray(self.Sigma_fin, dtype=float))
        for name, S in (("Sigma_ini", Sigma_ini), ("Sigma_fin", Sigma_fin)):
            if S.shape != (n, n):
                raise DimensionMismatch(f"{name} must be {n}x{n}")
            if np.linalg.eigvalsh(S).min() <= DEFAULT.pd_atol:
                raise NotPD(f"{name} must be strictly positive definite")
        object.__setattr__(self, "mu_ini", mu_ini)
        object.__setattr__(self, "mu_fin", mu_fin)
        object.__setattr__(self, "Sigma_ini", Sigma_ini)
        object.__setattr__(self, "Sigma_fin", Sigma_fin)

    @property
    def zero_means(self):
        return np.linalg.norm(self.mu_ini) == 0.0 and np.linalg.norm(self.mu_fin) == 0.0

    def initial(self):
        return Gaussian(self.mu_ini, self.Sigma_ini)

    def zero_mean_version(self):
        n = self.sys.n
        return DensitySteeringProblem(
            self.sys, np.zeros(n), self.Sigma_ini, np.zeros(n), self.Sigma_fin
        )


def reduce_weighted_cost(sys: LinearSystem, R, epsilon, tols: Tolerances = DEFAULT):
    """Absorb input weights R_k and a regularization coefficient epsilon into
    the input matrix: B'_k = sqrt(epsilon) * B_k * R_k^{-1/2}."""
    if epsilon <= 0:
        raise NotPD("epsilon must be positive")
    Rs = [np.asarray(r, dtype=float) for r in (R if not _is_single(R) else [R] * sys.T)]
    if len(Rs) != sys.T:
        raise DimensionMismatch("R must have length T")
    newB = []
    for Bk, Rk in zip(sys.B, Rs):
        lam, V = sym_eigh(Rk)
        if lam.min() <= tols.pd_atol:
            raise NotPD("input weights must be strictly positive definite")
        R_inv_half = symmetrize((V / np.sqrt(lam)) @ V.T)
        newB.append(math.sqrt(epsilon) * Bk @ R_inv_half)
    return sys.with_input(newB)


def _is_single(M):
    return np.asarray(M, dtype=float).ndim == 2


def effective_input_matrix(Bk, Sigma_rho, tols: Tolerances = DEFAULT):
    """B_k (Sigma_rho^{-1} + I)^{-1/2} via the PSD square root."""
    lam, V = sym_eigh(Sigma_rho)
    if lam.min() <= tols.pd_atol:
        raise NotPD("prior covariance must be strictly positive definite")
    shrink = symmetrize((V * np.sqrt(lam / (1.0 + lam))) @ V.T)
    return np.asarray(Bk, dtype=float) @ shrink


def _require_zero_means(prob):
    if not prob.zero_means:
        raise DimensionMismatch(
            "this operation expects zero boundary means; use the general variant"
        )


def mi_policy_for_prior(
    prob: DensitySteeringProblem, prior: GaussianPrior, tols: Tolerances = DEFAULT
):
    """Optimal policy for a fixed zero-mean prior.

    Runs the terminal-weight construction under the effective inputs
    B_k (Sigma_rho^{-1} + I)^{-1/2} and returns the policy with
    Sigma_k = (Sigma_rho^{-1} + I + B' Q_{k+1}^{-1} B)^{-1} and
    P_k = -Sigma_k B' Q_{k+1}^{-1} A_k.
    """
    _require_zero_means(prob)
    if not prior.zero_mean:
        raise DimensionMismatch("prior must be zero mean here")
    sys = prob.sys
    Beff = [effective_input_matrix(sys.B[k], prior.Sigma[k], tols) for k in range(sys.T)]
    tw = me_terminal_weight(sys, Beff, prob.Sigma_ini, prob.Sigma_fin, tols)
    P, q, Sig = [], [], []
    for k in range(sys.T):
        Bk = sys.B[k]
        Q_inv = tw.Q_inverse(k + 1, tols)
        lam, V = sym_eigh(prior.Sigma[k])
        prior_prec = symmetrize((V / lam) @ V.T)
        S = symmetrize(prior_prec + np.eye(sys.m) + Bk.T @ Q_inv @ Bk)
        lam_s, V_s = sym_eigh(S)
        if lam_s.min() <= tols.pd_atol:
            raise AssumptionViolated("policy_covariance_not_pd", index=k)
        Sigma_k = symmetrize((V_s / lam_s) @ V_s.T)
        P.append(-Sigma_k @ Bk.T @ Q_inv @ sys.A[k])
        q.append(np.zeros(sys.m))
        Sig.append(Sigma_k)
    return AffinePolicy(tuple(P), tuple(q), tuple(Sig))


def mi_prior_for_policy(
    prob: DensitySteeringProblem, policy: AffinePolicy, tols: Tolerances = DEFAULT
):
    """Optimal zero-mean prior for a fixed policy:
    Sigma_rho_k = Sigma_pi_k + P_k Sigma_x_k P_k^T."""
    moments = propagate_moments(prob.sys, policy, Gaussian(np.zeros(prob.sys.n), prob.Sigma_ini))
    Sig = []
    for k in range(prob.sys.T):
        Pk = policy.P[k]
        Sig.append(symmetrize(policy.Sigma[k] + Pk @ moments.covs[k] @ Pk.T))
    mu = tuple(np.zeros(prob.sys.m) for _ in range(prob.sys.T))
    return GaussianPrior(mu, tuple(Sig))


def _expected_kl_terms(policy, prior, moments, tols):
    """Per-step E[KL(pi_k(.|x) || rho_k)] under the closed-loop state law."""
    total = 0.0
    m = policy.m
    for k in range(policy.T):
        Pk, qk, Spi = policy.P[k], policy.q[k], policy.Sigma[k]
        lam, V = sym_eigh(prior.Sigma[k])
        if lam.min() <= tols.pd_atol:
            raise NotPD("prior covariance must be strictly positive definite")
        prec = symmetrize((V / lam) @ V.T)
        logdet_rho = float(np.log(lam).sum())
        logdet_pi = pd_logdet(Spi, tols)
        if logdet_pi == -math.inf:
            return math.inf
        a = Pk @ moments.means[k] + qk - prior.mu[k]
        quad = float(a @ prec @ a) + float(np.trace(prec @ Pk @ moments.covs[k] @ Pk.T))
        total += 0.5 * (
            float(np.trace(prec @ Spi)) - m + logdet_rho - logdet_pi + quad
        )
    return total


def objective_j(
    prob: DensitySteeringProblem,
    policy: AffinePolicy,
    prior: GaussianPrior,
    tols: Tolerances = DEFAULT,
):
    """Closed-form value of sum_k E[ ||u_k||^2 / 2 + KL(pi_k(.|x_k) || rho_k) ].

    Expectations are taken under the exact closed-loop moments; returns +inf
    when the KL term is infinite.
    """
    moments = propagate_moments(prob.sys, policy, prob.initial())
    quad = 0.0
    for k in range(policy.T):
        Pk, qk = policy.P[k], policy.q[k]
        u_mean = Pk @ moments.means[k] + qk
        quad += 0.5 * (
            float(np.trace(policy.Sigma[k]))
            + float(u_mean @ u_mean)
            + float(np.trace(Pk @ moments.covs[k] @ Pk.T))
        )
    kl = _expected_kl_terms(policy, prior, moments, tols)
    return quad + kl


def _terminal_errors(prob, moments):
    denom = max(np.linalg.norm(prob.Sigma_fin), np.finfo(float).tiny)
    cov_err = float(np.linalg.norm(moments.covs[-1] - prob.Sigma_fin) / denom)
    mean_err = float(np.linalg.norm(moments.means[-1] - prob.mu_fin))
    return cov_err, mean_err


@dataclass(frozen=True)
class AlternationStep:
    """One half-step of the alternation: the pair it produced and its objective."""

    kind: str  # "policy" or "prior"
    iteration: int
    policy: AffinePolicy
    prior: GaussianPrior
    objective: float
    terminal_cov_error: float
    terminal_mean_error: float


@dataclass
class AlternationTrace:
    steps: list
    failure: dict | None = None
    stopped_early: bool = False

    def objectives(self):
        return [s.objective for s in self.steps]

    def prior_iterates(self):
        """Prior covariance sequences after each prior half-step."""
        return [s.prior for s in self.steps if s.kind == "prior"]

    @property
    def final_policy(self):
        return self.steps[-1].policy if self.steps else None

    @property
    def final_prior(self):
        return self.steps[-1].prior if self.steps else None


def alternate_midc(
    prob: DensitySteeringProblem,
    prior0: GaussianPrior,
    iters: int = 10,
    tols: Tolerances = DEFAULT,
    stop_rtol: float | None = None,
):
    """Alternate the closed-form policy and prior optimizers.

    Records the objective after every half-step.  A failed hypothesis at some
    iteration stops the loop and returns the partial trace with a ``failure``
    record instead of raising.
    """
    _require_zero_means(prob)
    trace = AlternationTrace(steps=[])
    prior = prior0
    for i in range(iters):
        try:
            policy = mi_policy_for_prior(prob, prior, tols)
        except AssumptionViolated as exc:
            trace.failure = {"iteration": i, "reason": str(exc)}
            return trace
        moments = propagate_moments(prob.sys, policy, prob.initial())
        cov_err, mean_err = _terminal_errors(prob, moments)
        trace.steps.append(
            AlternationStep(
                "policy", i, policy, prior, objective_j(prob, policy, prior, tols),
                cov_err, mean_err,
            )
        )
        new_prior = mi_prior_for_policy(prob, policy, tols)
        trace.steps.append(
            AlternationStep(
                "prior", i, policy, new_prior,
                objective_j(prob, policy, new_prior, tols), cov_err, mean_err,
            )
        )
        if stop_rtol is not None and _prior_close(prior, new_prior, stop_rtol):
            trace.stopped_early = True
            return trace
        prior = new_prior
    return trace


def _prior_close(a, b, rtol):
    for Sa, Sb in zip(a.Sigma, b.Sigma):
        if np.linalg.norm(Sb - Sa) > rtol * max(np.linalg.norm(Sa), np.finfo(float).tiny):
            return False
    return True


@dataclass(frozen=True)
class MeanSteering:
    """Least-energy deterministic input and the mean trajectory it induces."""

    u_bar: tuple
    mu_star: tuple


def mean_steering(prob: DensitySteeringProblem, tols: Tolerances = DEFAULT):
    """Minimum-energy open-loop input steering the mean between the endpoints.

    u_k = B_k' Phi(T, k+1)' G_r(T, 0)^{-1} (mu_fin - Phi(T, 0) mu_ini),
    followed by the forward mean recursion.
    """
    sys = prob.sys
    G = reachability_gramian(sys, sys.T, 0)
    G_inv = sym_inverse(G, tols)
    if G_inv is None:
        raise SingularGramian("reachability Gramian over the full horizon is singular")
    residual = prob.mu_fin - state_transition(sys, sys.T, 0) @ prob.mu_ini
    w = G_inv @ residual
    u_bar, mu = [], [prob.mu_ini]
    for k in range(sys.T):
        uk = sys.B[k].T @ state_transition(sys, sys.T, k + 1).T @ w
        u_bar.append(uk)
        mu.append(sys.A[k] @ mu[-1] + sys.B[k] @ uk)
    return MeanSteering(tuple(u_bar), tuple(mu))


def shift_policy(policy: AffinePolicy, steering: MeanSteering):
    """Express pi_k(u - u_bar_k | x - mu_star_k) in affine form:
    same gains, offsets q_k = u_bar_k - P_k mu_star_k."""
    q = tuple(
        steering.u_bar[k] - policy.P[k] @ steering.mu_star[k] for k in range(policy.T)
    )
    return AffinePolicy(policy.P, q, policy.Sigma)


@dataclass
class GeneralAlternation:
    """Mean-steering input plus the alternation on the deviation problem."""

    steering: MeanSteering
    deviation: AlternationTrace
    policies: list  # shifted policies, one per completed iteration
    priors: list  # priors with means fixed to u_bar, one per completed iteration

    @property
    def final_policy(self):
        return self.policies[-1] if self.policies else None

    @property
    def final_prior(self):
        return self.priors[-1] if self.priors else None


def alternate_midc_general(
    prob: DensitySteeringProblem,
    prior0: GaussianPrior,
    iters: int = 10,
    tols: Tolerances = DEFAULT,
    stop_rtol: float | None = None,
):
    """Nonzero-mean boundary version: steer the mean with the deterministic
    least-energy input, alternate on the zero-mean deviation problem, then
    shift policies by (u_bar, mu_star) and fix prior means to u_bar."""
    steering = mean_steering(prob, tols)
    deviation = alternate_midc(prob.zero_mean_version(), prior0, iters, tols, stop_rtol)
    policies, priors = [], []
    for step in deviation.steps:
        if step.kind != "prior":
            continue
        policies.append(shift_policy(step.policy, steering))
        priors.append(step.prior.with_means(steering.u_bar))
    return GeneralAlternation(steering, deviation, policies, priors)


@dataclass(frozen=True)
class NonzeroMeanPolicyAux:
    """Backward residuals r_k (r_T = 0) used by the nonzero-mean-prior policy."""

    r: tuple
    riccati: object


def mi_policy_nonzero_mean_prior(
    sys: LinearSystem, prior: GaussianPrior, F, tols: Tolerances = DEFAULT
):
    """Closed-form optimal policy for a fixed prior with nonzero means.

    Backward residual recursion
    r_k = A_k^{-1} r_{k+1}
          - Gamma_k^{-1} A_k' Gamma_{k+1} B_k (I + Sigma_rho (I + B' Gamma B))^{-1} mu_rho,
    with offsets
    q_k = (I + Sigma_rho (I + B' Gamma B))^{-1} mu_rho + Sigma_pi B' Gamma_{k+1} r_{k+1}.
    """
    if not sys.all_A_invertible:
        raise SingularA("every A_k must be invertible")
    F = symmetrize(np.asarray(F, dtype=float))
    if sym_inverse(F, tols) is None:
        raise SingularF("terminal weight must be invertible")
    ricc = riccati_with_prior(sys, prior, F, tols)
    if not ricc.feasible:
        raise InfeasibleRiccati(ricc.infeasible_index)
    Gamma = ricc.Pi
    Gamma_inv = []
    for k, G in enumerate(Gamma):
        inv = sym_inverse(G, tols)
        if inv is None:
            raise InfeasibleRiccati(k, f"Gamma_{k} is singular")
        Gamma_inv.append(inv)

    T, m = sys.T, sys.m
    shrunk_mu = []
    Sigma_pi = []
    for k in range(T):
        Bk = sys.B[k]
        lam, V = sym_eigh(prior.Sigma[k])
        prec = symmetrize((V / lam) @ V.T)
        core = symmetrize(np.eye(m) + Bk.T @ Gamma[k + 1] @ Bk)
        S = symmetrize(prec + core)
        lam_s, V_s = sym_eigh(S)
        if lam_s.min() <= tols.pd_atol:
            raise InfeasibleRiccati(k)
        Sigma_pi.append(symmetrize((V_s / lam_s) @ V_s.T))
        shrunk_mu.append(np.linalg.solve(np.eye(m) + prior.Sigma[k] @ core, prior.mu[k]))

    r = [None] * (T + 1)
    r[T] = np.zeros(sys.n)
    for k in range(T - 1, -1, -1):
        Ak, Bk = sys.A[k], sys.B[k]
        r[k] = np.linalg.solve(Ak, r[k + 1]) - Gamma_inv[k] @ Ak.T @ Gamma[k + 1] @ Bk @ shrunk_mu[k]

    P, q = [], []
    for k in range(T):
        Bk = sys.B[k]
        P.append(-Sigma_pi[k] @ Bk.T @ Gamma[k + 1] @ sys.A[k])
        q.append(shrunk_mu[k] + Sigma_pi[k] @ Bk.T @ Gamma[k + 1] @ r[k + 1])
    policy = AffinePolicy(tuple(P), tuple(q), tuple(Sigma_pi))
    return policy, NonzeroMeanPolicyAux(tuple(r), ricc)
