import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densteer import (
    DegenerateCovariance,
    DegenerateReference,
    Gaussian,
    NotPSD,
    NotSymmetric,
    gaussian_entropy,
    kl_gaussian,
    kl_gaussian_on_support,
    pseudo_inverse,
    spd_sqrt,
)
from conftest import mc_gaussian_kl


def random_spd(rng, n, low=0.2, high=3.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * rng.uniform(low, high, n)) @ Q.T


class TestSpdSqrt:
    def test_identity(self):
        assert np.allclose(spd_sqrt(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        assert np.allclose(spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_multiply_back_seeded(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 8))
            M = random_spd(rng, n, 0.0, 5.0)
            R = spd_sqrt(M)
            assert np.linalg.norm(R @ R - M) <= 1e-9 * np.linalg.norm(M)
            assert np.allclose(R, R.T)

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            spd_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            spd_sqrt(np.diag([1.0, -1e-6]))

    def test_small_negative_clamped(self):
        R = spd_sqrt(np.diag([1.0, -5e-11]))
        assert R[1, 1] == 0.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 10_000))
    def test_multiply_back_property(self, n, seed):
        M = random_spd(np.random.default_rng(seed), n, 0.0, 4.0)
        R = spd_sqrt(M)
        assert np.linalg.norm(R @ R - M) <= 1e-9 * max(np.linalg.norm(M), 1e-30)


class TestPseudoInverse:
    def test_identity(self):
        assert np.allclose(pseudo_inverse(np.eye(2)), np.eye(2))

    def test_unit_column(self):
        col = np.array([[1.0], [0.0]])
        assert np.allclose(pseudo_inverse(col), np.array([[1.0, 0.0]]))

    def test_full_column_rank_left_inverse(self, rng):
        M = rng.standard_normal((3, 2))
        assert np.allclose(pseudo_inverse(M) @ M, np.eye(2), atol=1e-9)

    def test_penrose_identities_seeded(self, rng):
        for _ in range(30):
            rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            M = rng.standard_normal((rows, cols))
            Mp = pseudo_inverse(M)
            assert np.allclose(M @ Mp @ M, M, atol=1e-9)
            assert np.allclose(Mp @ M @ Mp, Mp, atol=1e-9)
            assert np.allclose((M @ Mp).T, M @ Mp, atol=1e-9)
            assert np.allclose((Mp @ M).T, Mp @ M, atol=1e-9)

    def test_rank_deficient(self):
        M = np.ones((3, 3))
        Mp = pseudo_inverse(M)
        assert np.allclose(Mp, M.T / 9.0)


class TestKlGaussian:
    def test_identical_is_zero(self):
        p = Gaussian(np.zeros(2), np.eye(2))
        assert kl_gaussian(p, p) == pytest.approx(0.0, abs=1e-12)

    def test_mean_shift_closed_form(self):
        p = Gaussian([0.0], [[1.0]])
        q = Gaussian([1.0], [[1.0]])
        assert kl_gaussian(p, q) == pytest.approx(0.5, abs=1e-12)
        mc, se = mc_gaussian_kl([0.0], [[1.0]], [1.0], [[1.0]])
        assert abs(0.5 - mc) <= 4 * se

    def test_variance_ratio_closed_form(self):
        p = Gaussian([0.0], [[2.0]])
        q = Gaussian([0.0], [[1.0]])
        expected = 0.5 * (2.0 - 1.0 - math.log(2.0))
        assert kl_gaussian(p, q) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.1534264, abs=1e-7)
        mc, se = mc_gaussian_kl([0.0], [[2.0]], [0.0], [[1.0]])
        assert abs(expected - mc) <= 4 * se

    def test_nonnegative_and_equality_iff(self, rng):
        for _ in range(25):
            d = int(rng.integers(1, 5))
            p = Gaussian(rng.uniform(-1, 1, d), random_spd(rng, d))
            q = Gaussian(rng.uniform(-1, 1, d), random_spd(rng, d))
            assert kl_gaussian(p, q) >= 0.0
        p = Gaussian([0.2, -0.1], random_spd(rng, 2))
        assert kl_gaussian(p, p) <= 1e-12
        # strictly positive once the pair separates beyond tolerance
        shifted = Gaussian(p.mean + 1e-4, p.cov)
        assert kl_gaussian(shifted, p) > 1e-10
        scaled = Gaussian(p.mean, p.cov * (1.0 + 1e-4))
        assert kl_gaussian(scaled, p) > 1e-10

    def test_affine_invariance(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 4))
            p = Gaussian(rng.uniform(-1, 1, d), random_spd(rng, d))
            q = Gaussian(rng.uniform(-1, 1, d), random_spd(rng, d))
            S = rng.standard_normal((d, d)) + 2.0 * np.eye(d)
            c = rng.uniform(-1, 1, d)
            kl = kl_gaussian(p, q)
            kl2 = kl_gaussian(
                Gaussian(S @ p.mean + c, S @ p.cov @ S.T),
                Gaussian(S @ q.mean + c, S @ q.cov @ S.T),
            )
            assert abs(kl2 - kl) <= 1e-9 * max(1.0, kl)

    def test_degenerate_reference_raises(self):
        p = Gaussian(np.zeros(2), np.eye(2))
        q = Gaussian(np.zeros(2), np.diag([1.0, 0.0]))
        with pytest.raises(DegenerateReference):
            kl_gaussian(p, q)

    def test_singular_p_against_pd_reference_is_infinite(self):
        p = Gaussian(np.zeros(2), np.diag([1.0, 0.0]))
        q = Gaussian(np.zeros(2), np.eye(2))
        assert kl_gaussian(p, q) == math.inf

    def test_support_restricted_degenerate_pair(self):
        # matching singular supports: finite restricted value
        cov = np.diag([1.0, 0.0])
        val = kl_gaussian_on_support([0.0, 0.0], 2.0 * cov, [0.0, 0.0], cov)
        assert val == pytest.approx(0.5 * (2.0 - 1.0 - math.log(2.0)), abs=1e-12)
        # mean difference outside the support: +inf sentinel
        assert kl_gaussian_on_support([0.0, 1.0], cov, [0.0, 0.0], cov) == math.inf
        # covariance mass outside the support: +inf sentinel
        assert kl_gaussian_on_support([0.0, 0.0], np.eye(2), [0.0, 0.0], cov) == math.inf

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 10_000))
    def test_nonnegativity_property(self, d, seed):
        r = np.random.default_rng(seed)
        p = Gaussian(r.uniform(-2, 2, d), random_spd(r, d))
        q = Gaussian(r.uniform(-2, 2, d), random_spd(r, d))
        assert kl_gaussian(p, q) >= -1e-12


class TestEntropy:
    def test_standard_normal(self):
        p = Gaussian([0.0], [[1.0]])
        assert gaussian_entropy(p) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-12)
        assert gaussian_entropy(p) == pytest.approx(1.4189385, abs=1e-7)

    def test_translation_invariance(self, rng):
        S = random_spd(rng, 3)
        a = gaussian_entropy(Gaussian(np.zeros(3), S))
        b = gaussian_entropy(Gaussian(rng.uniform(-5, 5, 3), S))
        assert a == pytest.approx(b, abs=1e-12)

    def test_scaled_variance(self):
        p = Gaussian([0.0], [[4.0]])
        assert gaussian_entropy(p) == pytest.approx(2.1120857, abs=1e-7)

    def test_singular_raises(self):
        with pytest.raises(DegenerateCovariance):
            gaussian_entropy(Gaussian(np.zeros(2), np.diag([1.0, 0.0])))


class TestGaussianInvariants:
    def test_rejects_asymmetric_covariance(self):
        with pytest.raises(NotSymmetric):
            Gaussian(np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]]))

    def test_rejects_indefinite_covariance(self):
        with pytest.raises(NotPSD):
            Gaussian(np.zeros(2), np.diag([1.0, -1e-3]))

    def test_dimension_check(self):
        from densteer import DimensionMismatch

        with pytest.raises(DimensionMismatch):
            Gaussian(np.zeros(2), np.eye(3))
