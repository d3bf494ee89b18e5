import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def mc_gaussian_kl(mean_p, cov_p, mean_q, cov_q, n_samples=1_000_000, seed=0):
    """Monte Carlo KL oracle: average log-density ratio over samples of p.

    Returns (estimate, standard_error).
    """
    rng = np.random.default_rng(seed)
    mean_p = np.atleast_1d(np.asarray(mean_p, dtype=float))
    cov_p = np.atleast_2d(np.asarray(cov_p, dtype=float))
    mean_q = np.atleast_1d(np.asarray(mean_q, dtype=float))
    cov_q = np.atleast_2d(np.asarray(cov_q, dtype=float))
    L = np.linalg.cholesky(cov_p)
    x = mean_p + rng.standard_normal((n_samples, mean_p.size)) @ L.T

    def logpdf(x, mean, cov):
        d = x - mean
        sol = np.linalg.solve(cov, d.T).T
        _, logdet = np.linalg.slogdet(cov)
        return -0.5 * ((d * sol).sum(axis=1) + logdet + mean.size * np.log(2 * np.pi))

    ratio = logpdf(x, mean_p, cov_p) - logpdf(x, mean_q, cov_q)
    return float(ratio.mean()), float(ratio.std(ddof=1) / np.sqrt(n_samples))
