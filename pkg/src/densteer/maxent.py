"""Entropy-regularized LQR and covariance steering.

Contains the backward Riccati recursion with its per-step positivity record,
the Lyapunov-based construction of the terminal weight that steers the state
covariance onto a target, and the Gaussian policies built from both.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import AssumptionViolated, DimensionMismatch, InfeasibleRiccati, NotPD
from .gaussian import is_invertible, spd_sqrt, sym_eigh, sym_inverse, symmetrize
from .linsys import (
    AffinePolicy,
    LinearSystem,
    controllability_gramian,
    reachability_gramian,
    state_transition,
)

__all__ = [
    "RiccatiSolution",
    "TerminalWeightSolution",
    "riccati_me",
    "riccati_with_prior",
    "me_policy",
    "me_terminal_weight",
    "me_density_policy",
]


def _input_seq(sys, Beff):
    if Beff is None:
        return sys.B
    mats = [np.asarray(b, dtype=float) for b in Beff]
    if len(mats) != sys.T:
        raise DimensionMismatch("effective input sequence must have length T")
    return tuple(mats)


@dataclass(frozen=True)
class RiccatiSolution:
    """Backward recursion output: Pi_T..Pi_0 plus a per-step positivity record.

    ``Pi[k]`` is None below the first infeasible step (the recursion halts
    there); ``step_feasible[k]`` records whether the matrix inverted at step k
    was strictly positive definite.
    """

    Pi: tuple
    F: np.ndarray
    step_feasible: tuple
    infeasible_index: int | None

    @property
    def feasible(self):
        return self.infeasible_index is None


def _riccati(sys, B, F, prior_precision, tols):
    """Shared backward recursion; prior_precision[k] is added to I + B' Pi B."""
    T = sys.T
    F = symmetrize(np.asarray(F, dtype=float))
    Pi = [None] * (T + 1)
    Pi[T] = F
    ok = [True] * T
    bad = None
    for k in range(T - 1, -1, -1):
        Ak = sys.A[k]
        Bk = B[k]
        S = np.eye(Bk.shape[1]) + Bk.T @ Pi[k + 1] @ Bk
        if prior_precision is not None:
            S = S + prior_precision[k]
        S = symmetrize(S)
        lam, V = sym_eigh(S)
        if lam.min() <= tols.pd_atol:
            ok[k] = False
            bad = k
            break
        S_inv = symmetrize((V / lam) @ V.T)
        APB = Ak.T @ Pi[k + 1] @ Bk
        Pi[k] = symmetrize(Ak.T @ Pi[k + 1] @ Ak - APB @ S_inv @ APB.T)
    return RiccatiSolution(tuple(Pi), F, tuple(ok), bad)


def riccati_me(sys: LinearSystem, Beff, F, tols: Tolerances = DEFAULT):
    """Riccati recursion Pi_k = A'Pi A - A'Pi B (I + B'Pi B)^{-1} B'Pi A, Pi_T = F.

    Infeasibility (I + B'Pi B not strictly PD at some k) is reported in the
    returned record, not raised.
    """
    return _riccati(sys, _input_seq(sys, Beff), F, None, tols)


def riccati_with_prior(sys: LinearSystem, prior, F, tols: Tolerances = DEFAULT):
    """Riccati recursion whose inverted block is Sigma_rho^{-1} + I + B'Pi B."""
    precisions = []
    for S in prior.Sigma:
        lam, V = sym_eigh(S)
        if lam.min() <= tols.pd_atol:
            raise NotPD("prior covariance must be strictly positive definite")
        precisions.append(symmetrize((V / lam) @ V.T))
    return _riccati(sys, sys.B, F, precisions, tols)


def me_policy(sys: LinearSystem, Beff, ricc: RiccatiSolution, tols: Tolerances = DEFAULT):
    """Optimal entropy-regularized policy for a feasible Riccati solution.

    Sigma_k = (I + B'Pi_{k+1}B)^{-1}, P_k = -Sigma_k B'Pi_{k+1} A_k, q_k = 0.
    """
    if not ricc.feasible:
        raise InfeasibleRiccati(ricc.infeasible_index)
    B = _input_seq(sys, Beff)
    P, q, Sig = [], [], []
    for k in range(sys.T):
        Bk = B[k]
        S = symmetrize(np.eye(Bk.shape[1]) + Bk.T @ ricc.Pi[k + 1] @ Bk)
        lam, V = sym_eigh(S)
        if lam.min() <= tols.pd_atol:
            raise InfeasibleRiccati(k)
        Sigma_k = symmetrize((V / lam) @ V.T)
        P.append(-Sigma_k @ Bk.T @ ricc.Pi[k + 1] @ sys.A[k])
        q.append(np.zeros(Bk.shape[1]))
        Sig.append(Sigma_k)
    return AffinePolicy(tuple(P), tuple(q), tuple(Sig))


@dataclass(frozen=True)
class TerminalWeightSolution:
    """Lyapunov-recursion weights Q_0..Q_T with F = Q_T^{-1} and intermediates."""

    Q: tuple
    F: np.ndarray
    S0: np.ndarray
    ST: np.ndarray
    calF: np.ndarray
    split_index: int

    def Q_inverse(self, k, tols: Tolerances = DEFAULT):
        inv = sym_inverse(self.Q[k], tols)
        if inv is None:
            raise AssumptionViolated("singular_weight_recursion", index=k)
        return inv


def _admissible_split_index(sys, B, tols):
    """Smallest k_r in [1, T] with G_r(k, 0) invertible for k >= k_r and
    G_r(T, k) invertible for k < k_r."""
    T = sys.T
    inv_from_zero = {k: is_invertible(reachability_gramian(sys, k, 0, B), tols) for k in range(1, T + 1)}
    inv_to_T = {k: is_invertible(reachability_gramian(sys, T, k, B), tols) for k in range(0, T)}
    for kr in range(1, T + 1):
        if all(inv_from_zero[k] for k in range(kr, T + 1)) and all(
            inv_to_T[k] for k in range(0, kr)
        ):
            return kr
    raise AssumptionViolated("no_admissible_split_index")


def me_terminal_weight(
    sys: LinearSystem, Beff, Sigma_ini, Sigma_fin, tols: Tolerances = DEFAULT
):
    """Terminal weight F steering the closed-loop covariance onto Sigma_fin.

    Builds S0, ST from the controllability Gramian, solves the quadratic
    matrix relation through the PSD square root, then runs the forward
    Lyapunov recursion Q_{k+1} = A Q A' - B B' from
    Q_0 = Gc^{1/2} S0^{1/2} calF^{-1} S0^{1/2} Gc^{1/2} and returns F = Q_T^{-1}.

    Each hypothesis is checked separately and reported through
    :class:`AssumptionViolated` with a ``which`` tag.
    """
    B = _input_seq(sys, Beff)
    Sigma_ini = symmetrize(np.asarray(Sigma_ini, dtype=float))
    Sigma_fin = symmetrize(np.asarray(Sigma_fin, dtype=float))
    if not sys.all_A_invertible:
        raise AssumptionViolated("singular_A")
    Gc = controllability_gramian(sys, sys.T, 0, B)
    lam, V = sym_eigh(Gc)
    if lam.min() <= tols.rank_rtol * max(lam.max(), np.finfo(float).tiny):
        raise AssumptionViolated("singular_gramian")
    split = _admissible_split_index(sys, B, tols)
    Gc_half = symmetrize((V * np.sqrt(lam)) @ V.T)
    Gc_half_inv = symmetrize((V / np.sqrt(lam)) @ V.T)

    S0 = symmetrize(Gc_half_inv @ Sigma_ini @ Gc_half_inv)
    Phi0T = state_transition(sys, 0, sys.T)
    ST = symmetrize(Gc_half_inv @ Phi0T @ Sigma_fin @ Phi0T.T @ Gc_half_inv)
    S0_half = spd_sqrt(S0, tols)

    inner = symmetrize(S0_half @ ST @ S0_half) + 0.25 * np.eye(sys.n)
    lam_in, V_in = sym_eigh(inner)
    if lam_in.min() < -tols.psd_atol:
        raise AssumptionViolated("indefinite_sqrt_argument")
    root = symmetrize((V_in * np.sqrt(np.clip(lam_in, 0.0, None))) @ V_in.T)

    calF = symmetrize(S0 + 0.5 * np.eye(sys.n) - root)
    calF_inv = sym_inverse(calF, tols)
    if calF_inv is None:
        raise AssumptionViolated("singular_factor_minus")
    factor_plus = symmetrize(-S0 + 0.5 * np.eye(sys.n) + root)
    if sym_inverse(factor_plus, tols) is None:
        raise AssumptionViolated("singular_factor_plus")

    Q = [symmetrize(Gc_half @ S0_half @ calF_inv @ S0_half @ Gc_half)]
    for k in range(sys.T):
        Qk1 = symmetrize(sys.A[k] @ Q[-1] @ sys.A[k].T - B[k] @ B[k].T)
        Q.append(Qk1)
    for k, Qk in enumerate(Q):
        if sym_inverse(Qk, tols) is None:
            raise AssumptionViolated("singular_weight_recursion", index=k)
    F = sym_inverse(Q[-1], tols)
    return TerminalWeightSolution(tuple(Q), F, S0, ST, calF, split)


def me_density_policy(
    sys: LinearSystem, Beff, Sigma_ini, Sigma_fin, tols: Tolerances = DEFAULT
):
    """Covariance-steering policy: the entropy-regularized policy under the
    terminal weight F = Q_T^{-1} from :func:`me_terminal_weight`."""
    tw = me_terminal_weight(sys, Beff, Sigma_ini, Sigma_fin, tols)
    ricc = riccati_me(sys, Beff, tw.F, tols)
    return me_policy(sys, Beff, ricc, tols)
