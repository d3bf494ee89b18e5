"""Time-varying discrete-time linear systems.

Holds the system matrices, state-transition products, finite-horizon
Gramians, and exact first/second moment propagation under affine Gaussian
feedback policies.  Everything is immutable after construction.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import BadRange, DimensionMismatch, NotPD, SingularA
from .gaussian import Gaussian, pseudo_inverse, symmetrize

__all__ = [
    "LinearSystem",
    "AffinePolicy",
    "GaussianPrior",
    "MomentTrajectory",
    "state_transition",
    "reachability_gramian",
    "controllability_gramian",
    "propagate_moments",
]


def _is_single_matrix(M):
    """True when M denotes one matrix (2-D array or nested list of rows)."""
    if isinstance(M, np.ndarray):
        return M.ndim == 2
    elems = list(M)
    return bool(elems) and all(np.asarray(e, dtype=float).ndim == 1 for e in elems)


def _as_matrix_seq(M, T, rows, cols, what):
    """Normalize a single matrix (time-invariant shorthand) or a length-T
    sequence to a tuple of arrays."""
    if _is_single_matrix(M):
        mats = [np.asarray(M, dtype=float)] * T
    else:
        mats = [np.asarray(m, dtype=float) for m in M]
    if len(mats) != T:
        raise DimensionMismatch(f"{what} must have length {T}, got {len(mats)}")
    for m in mats:
        if m.shape != (rows, cols):
            raise DimensionMismatch(f"{what} entries must be {rows}x{cols}, got {m.shape}")
    return tuple(mats)


@dataclass(frozen=True)
class LinearSystem:
    """x_{k+1} = A_k x_k + B_k u_k over horizon T.

    ``A`` and ``B`` may each be a single matrix (time-invariant shorthand) or
    a length-T sequence.  ``all_A_invertible`` records whether every A_k has
    min singular value > 1e-12 * max singular value; backward transitions
    require it.
    """

    A: tuple
    B: tuple
    T: int
    n: int = field(init=False)
    m: int = field(init=False)
    all_A_invertible: bool = field(init=False)

    def __post_init__(self):
        if self.T < 1:
            raise BadRange("horizon must be >= 1")

        def _first(M):
            arr = np.asarray(M if _is_single_matrix(M) else M[0], dtype=float)
            if arr.ndim != 2:
                raise DimensionMismatch("system matrices must be 2-D")
            return arr

        n = _first(self.A).shape[0]
        m = _first(self.B).shape[1]
        A = _as_matrix_seq(self.A, self.T, n, n, "A")
        B = _as_matrix_seq(self.B, self.T, n, m, "B")
        invertible = True
        A_inv = []
        for Ak in A:
            s = np.linalg.svd(Ak, compute_uv=False)
            if s.min() <= DEFAULT.rank_rtol * max(s.max(), np.finfo(float).tiny):
                invertible = False
                break
            A_inv.append(np.linalg.inv(Ak))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "all_A_invertible", invertible)
        object.__setattr__(self, "_A_inv", tuple(A_inv) if invertible else None)

    def with_input(self, Beff):
        """Same dynamics with a replacement input-matrix sequence."""
        return LinearSystem(self.A, tuple(np.asarray(b, dtype=float) for b in Beff), self.T)

    def input_full_column_rank(self, tols: Tolerances = DEFAULT):
        for Bk in self.B:
            s = np.linalg.svd(Bk, compute_uv=False)
            if Bk.shape[1] > Bk.shape[0]:
                return False
            if s.min() <= tols.rank_rtol * max(s.max(), np.finfo(float).tiny):
                return False
        return True

    def input_pinv(self, k):
        return pseudo_inverse(self.B[k])


def state_transition(sys: LinearSystem, k, l):
    """Phi(k, l): A_{k-1}...A_l for k > l, identity for k = l, and the
    corresponding inverse product A_k^{-1}...A_{l-1}^{-1} for k < l."""
    if not (0 <= k <= sys.T and 0 <= l <= sys.T):
        raise BadRange(f"indices must lie in [0, {sys.T}]")
    if k == l:
        return np.eye(sys.n)
    if k > l:
        M = np.eye(sys.n)
        for j in range(l, k):
            M = sys.A[j] @ M
        return M
    if not sys.all_A_invertible:
        raise SingularA("backward transition needs every A_k invertible")
    M = np.eye(sys.n)
    for j in range(k, l):
        M = M @ sys._A_inv[j]
    return M


def reachability_gramian(sys: LinearSystem, k1, k0, Beff=None):
    """G_r(k1, k0) = sum_{k=k0}^{k1-1} Phi(k1, k+1) B_k B_k^T Phi(k1, k+1)^T."""
    if not (0 <= k0 < k1 <= sys.T):
        raise BadRange(f"need 0 <= k0 < k1 <= {sys.T}")
    B = sys.B if Beff is None else Beff
    G = np.zeros((sys.n, sys.n))
    for k in range(k0, k1):
        Phi = state_transition(sys, k1, k + 1)
        M = Phi @ np.asarray(B[k], dtype=float)
        G += M @ M.T
    return symmetrize(G)


def controllability_gramian(sys: LinearSystem, k1, k0, Beff=None):
    """G_c(k1, k0) = sum_{k=k0}^{k1-1} Phi(k0, k+1) B_k B_k^T Phi(k0, k+1)^T.

    Uses backward transitions, so every A_k must be invertible.
    """
    if not (0 <= k0 < k1 <= sys.T):
        raise BadRange(f"need 0 <= k0 < k1 <= {sys.T}")
    B = sys.B if Beff is None else Beff
    G = np.zeros((sys.n, sys.n))
    for k in range(k0, k1):
        Phi = state_transition(sys, k0, k + 1)
        M = Phi @ np.asarray(B[k], dtype=float)
        G += M @ M.T
    return symmetrize(G)


@dataclass(frozen=True)
class AffinePolicy:
    """Per-step input law u_k | x ~ N(P_k x + q_k, Sigma_k)."""

    P: tuple
    q: tuple
    Sigma: tuple

    def __post_init__(self):
        P = tuple(np.asarray(p, dtype=float) for p in self.P)
        m, n = P[0].shape
        q = tuple(np.asarray(v, dtype=float).reshape(m) for v in self.q)
        Sigma = tuple(symmetrize(np.asarray(s, dtype=float)) for s in self.Sigma)
        if not (len(P) == len(q) == len(Sigma)):
            raise DimensionMismatch("policy sequences must share one length")
        for p, s in zip(P, Sigma):
            if p.shape != (m, n) or s.shape != (m, m):
                raise DimensionMismatch("inconsistent policy matrix shapes")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "Sigma", Sigma)

    @property
    def T(self):
        return len(self.P)

    @property
    def m(self):
        return self.P[0].shape[0]

    @property
    def n(self):
        return self.P[0].shape[1]

    def in_zero_feedforward_class(self, tols: Tolerances = DEFAULT):
        """True when every q_k = 0 and Im(P_k) lies inside Im(Sigma_k)."""
        for Pk, qk, Sk in zip(self.P, self.q, self.Sigma):
            if np.linalg.norm(qk) > tols.class_atol:
                return False
            proj = np.eye(self.m) - Sk @ pseudo_inverse(Sk, tols)
            if np.linalg.norm(proj @ Pk) > tols.class_atol:
                return False
        return True


@dataclass(frozen=True)
class GaussianPrior:
    """Feedforward input law u_k ~ N(mu_k, Sigma_k) with strictly PD Sigma_k."""

    mu: tuple
    Sigma: tuple

    def __post_init__(self):
        Sigma = tuple(symmetrize(np.asarray(s, dtype=float)) for s in self.Sigma)
        m = Sigma[0].shape[0]
        mu = tuple(np.asarray(v, dtype=float).reshape(m) for v in self.mu)
        if len(mu) != len(Sigma):
            raise DimensionMismatch("prior sequences must share one length")
        for s in Sigma:
            if s.shape != (m, m):
                raise DimensionMismatch("inconsistent prior covariance shapes")
            if np.linalg.eigvalsh(s).min() <= DEFAULT.pd_atol:
                raise NotPD("prior covariance must be strictly positive definite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "Sigma", Sigma)

    @property
    def T(self):
        return len(self.mu)

    @property
    def m(self):
        return self.Sigma[0].shape[0]

    @property
    def zero_mean(self):
        return all(np.linalg.norm(v) == 0.0 for v in self.mu)

    @classmethod
    def identity(cls, m, T, scale=1.0):
        return cls(tuple(np.zeros(m) for _ in range(T)), tuple(scale * np.eye(m) for _ in range(T)))

    def with_means(self, mu):
        return GaussianPrior(tuple(np.asarray(v, dtype=float) for v in mu), self.Sigma)


@dataclass(frozen=True)
class MomentTrajectory:
    """State means and covariances at k = 0..T."""

    means: tuple
    covs: tuple

    @property
    def T(self):
        return len(self.means) - 1


def propagate_moments(sys: LinearSystem, policy: AffinePolicy, init: Gaussian):
    """Exact closed-loop moment recursion under an affine Gaussian policy.

    mean_{k+1} = A_k mean_k + B_k (P_k mean_k + q_k)
    cov_{k+1}  = (A_k + B_k P_k) cov_k (A_k + B_k P_k)^T + B_k Sigma_k B_k^T
    """
    if policy.T != sys.T:
        raise DimensionMismatch("policy horizon does not match the system")
    if policy.n != sys.n or policy.m != sys.m:
        raise DimensionMismatch("policy dimensions do not match the system")
    if init.dim != sys.n:
        raise DimensionMismatch("initial distribution dimension does not match the system")
    means = [init.mean]
    covs = [symmetrize(init.cov)]
    for k in range(sys.T):
        Ak, Bk = sys.A[k], sys.B[k]
        closed = Ak + Bk @ policy.P[k]
        means.append(closed @ means[-1] + Bk @ policy.q[k])
        covs.append(symmetrize(closed @ covs[-1] @ closed.T + Bk @ policy.Sigma[k] @ Bk.T))
    return MomentTrajectory(tuple(means), tuple(covs))
