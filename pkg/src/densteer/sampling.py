"""Seeded random problem instances for the property suite and tests.

Instances are drawn from a benign family (well-conditioned matrices, moderate
horizons) and rejected until the terminal-weight construction succeeds under
a unit prior, so downstream checks exercise feasible problems.
"""

import numpy as np

from .config import DEFAULT
from .errors import SteeringError
from .gaussian import symmetrize
from .linsys import GaussianPrior, LinearSystem
from .mi_control import DensitySteeringProblem, mean_steering, mi_policy_for_prior

__all__ = ["random_spd", "random_system", "random_instance"]


def random_spd(rng, n, eig_low=0.5, eig_high=2.0):
    """SPD matrix with eigenvalues uniform in [eig_low, eig_high]."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = rng.uniform(eig_low, eig_high, size=n)
    return symmetrize((Q * lam) @ Q.T)


def _random_full_rank(rng, rows, cols, s_low, s_high):
    U, _ = np.linalg.qr(rng.standard_normal((rows, rows)))
    V, _ = np.linalg.qr(rng.standard_normal((cols, cols)))
    s = rng.uniform(s_low, s_high, size=cols)
    return U[:, :cols] @ (s[:, None] * V.T)


def random_system(rng, n, m, T, time_varying=True):
    """Invertible A_k with singular values in [0.6, 1.05]; full-column-rank B_k."""
    steps = T if time_varying else 1
    A = [_random_full_rank(rng, n, n, 0.6, 1.05) for _ in range(steps)]
    B = [_random_full_rank(rng, n, m, 0.6, 1.4) for _ in range(steps)]
    if not time_varying:
        A, B = A * T, B * T
    return LinearSystem(A, B, T)


def random_instance(
    rng,
    n=None,
    m=None,
    T=None,
    nonzero_means=False,
    time_varying=True,
    max_attempts=200,
):
    """Feasible steering instance: retried until the fixed-prior policy exists
    (and, with nonzero means, the mean-steering Gramian is invertible)."""
    for _ in range(max_attempts):
        nn = int(n) if n is not None else int(rng.integers(1, 5))
        mm = int(m) if m is not None else int(rng.integers(1, nn + 1))
        # the admissible split index needs an invertible reachability Gramian
        # over both a prefix and a suffix of the horizon
        lo = max(2, 2 * (-(-nn // mm)) - 1)
        TT = int(T) if T is not None else int(rng.integers(lo, max(lo + 1, 11)))
        if TT < lo:
            raise ValueError(f"horizon {TT} too short for n={nn}, m={mm} (need >= {lo})")
        sys = random_system(rng, nn, mm, TT, time_varying)
        Sigma_ini = random_spd(rng, nn, 0.6, 1.8)
        Sigma_fin = random_spd(rng, nn, 0.6, 1.8)
        if nonzero_means:
            mu_ini = rng.uniform(-1.0, 1.0, size=nn)
            mu_fin = rng.uniform(-1.0, 1.0, size=nn)
        else:
            mu_ini = np.zeros(nn)
            mu_fin = np.zeros(nn)
        try:
            prob = DensitySteeringProblem(sys, mu_ini, Sigma_ini, mu_fin, Sigma_fin)
            probe = prob.zero_mean_version()
            mi_policy_for_prior(probe, GaussianPrior.identity(mm, TT), DEFAULT)
            if nonzero_means:
                mean_steering(prob, DEFAULT)
        except SteeringError:
            continue
        return prob
    raise RuntimeError("could not draw a feasible instance")
