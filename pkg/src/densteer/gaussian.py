"""Symmetric-matrix primitives and Gaussian distributions.

Square roots, inverses, determinants and pseudo-inverses are all computed
through symmetric eigendecompositions (never Cholesky) so that PSD-but-not-PD
and near-singular inputs are handled uniformly by eigenvalue clamping.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    DegenerateCovariance,
    DegenerateReference,
    DimensionMismatch,
    NotPSD,
    NotSymmetric,
)

__all__ = [
    "Gaussian",
    "spd_sqrt",
    "pseudo_inverse",
    "kl_gaussian",
    "kl_gaussian_on_support",
    "gaussian_entropy",
]


def symmetrize(M):
    """Return the symmetric part (M + M.T) / 2."""
    return 0.5 * (M + M.T)


def check_symmetric(M, tols: Tolerances = DEFAULT, what: str = "matrix"):
    """Raise :class:`NotSymmetric` unless M is symmetric within tolerance."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {M.shape}")
    dev = np.linalg.norm(M - M.T)
    if dev > tols.symmetry_rtol * max(1.0, np.linalg.norm(M)):
        raise NotSymmetric(f"{what} deviates from symmetry by {dev:.3e}")
    return M


def sym_eigh(M):
    """Eigendecomposition of the symmetric part of M."""
    return np.linalg.eigh(symmetrize(np.asarray(M, dtype=float)))


def sym_apply(M, fn):
    """Apply a scalar function to the eigenvalues of a symmetric matrix."""
    lam, V = sym_eigh(M)
    return symmetrize((V * fn(lam)) @ V.T)


def sym_inverse(M, tols: Tolerances = DEFAULT):
    """Inverse of a symmetric (possibly indefinite) matrix, or None if singular.

    Singularity means min |eig| <= rank_rtol * max |eig|.
    """
    lam, V = sym_eigh(M)
    mags = np.abs(lam)
    if mags.size == 0 or mags.min() <= tols.rank_rtol * max(mags.max(), np.finfo(float).tiny):
        return None
    return symmetrize((V / lam) @ V.T)


def pd_inverse(M, tols: Tolerances = DEFAULT, what: str = "matrix"):
    """Inverse of a strictly PD matrix; raises :class:`NotPD` otherwise."""
    lam, V = sym_eigh(M)
    if lam.min() <= tols.pd_atol:
        raise NotPD(f"{what} is not strictly positive definite (min eig {lam.min():.3e})")
    return symmetrize((V / lam) @ V.T)


def pd_logdet(M, tols: Tolerances = DEFAULT):
    """log det of a strictly PD matrix, or -inf if it is singular."""
    lam = np.linalg.eigvalsh(symmetrize(np.asarray(M, dtype=float)))
    if lam.min() <= tols.pd_atol:
        return -math.inf
    return float(np.log(lam).sum())


def is_invertible(M, tols: Tolerances = DEFAULT):
    """True when min singular value > rank_rtol * max singular value."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if s.size == 0:
        return False
    return bool(s.min() > tols.rank_rtol * max(s.max(), np.finfo(float).tiny))


@dataclass(frozen=True)
class Gaussian:
    """Multivariate normal given by a mean vector and a symmetric PSD covariance.

    Construction validates symmetry (relative tolerance 1e-10) and positive
    semidefiniteness (eigenvalues >= -1e-10).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        if mean.ndim != 1:
            raise DimensionMismatch("mean must be a vector")
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                f"covariance shape {cov.shape} does not match mean of length {mean.size}"
            )
        check_symmetric(cov, what="covariance")
        lam = np.linalg.eigvalsh(symmetrize(cov))
        if lam.min() < -DEFAULT.psd_atol:
            raise NotPSD(f"covariance has eigenvalue {lam.min():.3e}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.size

    @classmethod
    def standard(cls, d):
        return cls(np.zeros(d), np.eye(d))


def spd_sqrt(M, tols: Tolerances = DEFAULT):
    """Symmetric PSD square root R of a symmetric PSD matrix, R @ R = M.

    Eigenvalues in [-psd_atol, 0) are clamped to zero; anything below
    -psd_atol raises :class:`NotPSD`.
    """
    M = check_symmetric(M, tols, what="square-root argument")
    lam, V = sym_eigh(M)
    if lam.min() < -tols.psd_atol:
        raise NotPSD(f"square-root argument has eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    return symmetrize((V * np.sqrt(lam)) @ V.T)


def pseudo_inverse(M, tols: Tolerances = DEFAULT):
    """Moore-Penrose inverse with singular values below
    rank_rtol * s_max * max(n, m) treated as zero."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch("pseudo_inverse expects a matrix")
    return np.linalg.pinv(M, rcond=tols.rank_rtol * max(M.shape))


def gaussian_entropy(p: Gaussian, tols: Tolerances = DEFAULT):
    """Differential entropy (1/2) log((2 pi e)^d det cov); requires PD cov."""
    ld = pd_logdet(p.cov, tols)
    if ld == -math.inf:
        raise DegenerateCovariance("entropy undefined for singular covariance")
    return 0.5 * (p.dim * math.log(2.0 * math.pi * math.e) + ld)


def kl_gaussian_on_support(mean_p, cov_p, mean_q, cov_q, tols: Tolerances = DEFAULT):
    """KL divergence between Gaussians allowing a PSD reference covariance.

    The divergence is evaluated on the support (column space) of cov_q.  It is
    +inf when the mean difference or cov_p leaks outside that support, or when
    cov_p is rank deficient relative to it.  Degenerate pairs with matching
    supports get the finite restricted value.
    """
    mean_p = np.atleast_1d(np.asarray(mean_p, dtype=float))
    mean_q = np.atleast_1d(np.asarray(mean_q, dtype=float))
    cov_p = np.atleast_2d(np.asarray(cov_p, dtype=float))
    cov_q = np.atleast_2d(np.asarray(cov_q, dtype=float))
    d = mean_p.size
    if mean_q.size != d or cov_p.shape != (d, d) or cov_q.shape != (d, d):
        raise DimensionMismatch("KL operands must share one dimension")

    lam, V = sym_eigh(cov_q)
    lmax = max(lam.max(initial=0.0), 0.0)
    cutoff = tols.rank_rtol * max(lmax, np.finfo(float).tiny)
    keep = lam > cutoff
    r = int(keep.sum())
    delta = mean_p - mean_q

    scale_m = max(1.0, float(np.linalg.norm(delta)))
    scale_c = max(1.0, float(np.linalg.norm(cov_p)))
    if r == 0:
        # point-mass reference: KL is zero only against the same point mass
        if np.linalg.norm(delta) <= tols.support_rtol * scale_m and (
            np.linalg.norm(cov_p) <= tols.support_rtol * scale_c
        ):
            return 0.0
        return math.inf

    U = V[:, keep]
    lam_s = lam[keep]

    # leakage outside Im(cov_q)
    resid_mean = delta - U @ (U.T @ delta)
    if np.linalg.norm(resid_mean) > tols.support_rtol * scale_m:
        return math.inf
    proj_p = U @ (U.T @ cov_p @ U) @ U.T
    if np.linalg.norm(cov_p - proj_p) > tols.support_rtol * scale_c:
        return math.inf

    Cp = symmetrize(U.T @ cov_p @ U)
    lp = np.linalg.eigvalsh(Cp)
    if lp.min() <= tols.rank_rtol * max(lp.max(initial=0.0), np.finfo(float).tiny):
        return math.inf
    delta_s = U.T @ delta
    # Tr(diag(lam_s)^-1 Cp) = sum_i Cp[i, i] / lam_s[i]
    trace_term = float((np.diag(Cp) / lam_s).sum())
    quad = float((delta_s**2 / lam_s).sum())
    logdet_q = float(np.log(lam_s).sum())
    logdet_p = float(np.log(lp).sum())
    return 0.5 * (trace_term + quad - r + logdet_q - logdet_p)


def kl_gaussian(p: Gaussian, q: Gaussian, tols: Tolerances = DEFAULT):
    """KL divergence D(p || q) between Gaussians with a strictly PD reference.

    Returns +inf when p has no density with respect to q (rank-deficient
    cov_p).  Raises :class:`DegenerateReference` when cov_q is not strictly PD.
    """
    if p.dim != q.dim:
        raise DimensionMismatch(f"dimension mismatch {p.dim} vs {q.dim}")
    if np.linalg.eigvalsh(symmetrize(q.cov)).min() <= tols.pd_atol:
        raise DegenerateReference("reference covariance is not strictly positive definite")
    return kl_gaussian_on_support(p.mean, p.cov, q.mean, q.cov, tols)
