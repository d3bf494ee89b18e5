import numpy as np
import pytest

from densteer import (
    BadRange,
    ExperimentConfig,
    Gaussian,
    LinearSystem,
    TooFewSamples,
    ZeroTruth,
    fit_gaussian_ml,
    relative_error,
    run_experiment,
    simulate_particles,
    true_noise_cov,
)


class TestTrueNoiseCov:
    def test_initial_step(self):
        assert np.allclose(true_noise_cov(0, 10, 2, 1.0), 0.1 * np.eye(2))

    def test_final_step(self):
        assert np.allclose(true_noise_cov(9, 10, 2, 1.0), 1.0 * np.eye(2))

    def test_alpha_scaling(self):
        assert np.allclose(true_noise_cov(0, 10, 3, 5.0), 0.5 * np.eye(3))

    def test_bad_range(self):
        with pytest.raises(BadRange):
            true_noise_cov(10, 10, 2, 1.0)
        with pytest.raises(BadRange):
            true_noise_cov(0, 1, 2, 1.0)


class TestSimulateParticles:
    def test_deterministic_orbit_with_zero_noise(self):
        sys = LinearSystem(np.array([[0.5, 0.1], [0.0, 0.8]]), np.eye(2), 4)
        init = Gaussian(np.array([1.0, -2.0]), np.zeros((2, 2)))
        noise = [np.zeros((2, 2))] * 4
        paths = simulate_particles(sys, noise, init, 7, seed=3)
        x = init.mean
        for k in range(5):
            assert np.allclose(paths[:, k, :], x, atol=1e-12)
            if k < 4:
                x = sys.A[k] @ x
        assert paths.shape == (7, 5, 2)

    def test_terminal_moments_match_propagation(self):
        rng = np.random.default_rng(1)
        n, T = 2, 5
        A = 0.9 * np.eye(n) + 0.1 * rng.uniform(-1, 1, (n, n))
        sys = LinearSystem(A, np.eye(n), T)
        noise = [true_noise_cov(k, T, n, 1.0) for k in range(T)]
        init = Gaussian(np.zeros(n), np.eye(n))
        N = 100_000
        paths = simulate_particles(sys, noise, init, N, seed=42)
        S = init.cov
        for k in range(T):
            S = sys.A[k] @ S @ sys.A[k].T + noise[k]
        xT = paths[:, T, :]
        se_mean = xT.std(axis=0, ddof=1) / np.sqrt(N)
        assert np.all(np.abs(xT.mean(axis=0)) <= 4 * se_mean)
        sample_cov = np.cov(xT.T)
        for i in range(n):
            for j in range(n):
                band = 4 * np.sqrt((S[i, i] * S[j, j] + S[i, j] ** 2) / N)
                assert abs(sample_cov[i, j] - S[i, j]) <= band

    def test_bit_identical_for_same_seed(self):
        sys = LinearSystem(np.eye(2), np.eye(2), 3)
        init = Gaussian(np.zeros(2), np.eye(2))
        noise = [np.eye(2)] * 3
        a = simulate_particles(sys, noise, init, 50, seed=99)
        b = simulate_particles(sys, noise, init, 50, seed=99)
        assert np.array_equal(a, b)
        c = simulate_particles(sys, noise, init, 50, seed=100)
        assert not np.array_equal(a, c)


class TestFitGaussianMl:
    def test_two_point_hand_fit(self):
        g = fit_gaussian_ml(np.array([[0.0], [2.0]]))
        assert g.mean[0] == pytest.approx(1.0)
        assert g.cov[0, 0] == pytest.approx(1.0)  # ML divisor N, not N-1

    def test_identical_samples_degenerate(self):
        g = fit_gaussian_ml(np.ones((5, 2)))
        assert np.allclose(g.cov, 0.0)

    def test_large_sample_recovery(self):
        rng = np.random.default_rng(7)
        mean = np.array([0.5, -1.0])
        cov = np.array([[1.0, 0.3], [0.3, 0.7]])
        N = 1_000_000
        X = mean + rng.standard_normal((N, 2)) @ np.linalg.cholesky(cov).T
        g = fit_gaussian_ml(X)
        assert np.all(np.abs(g.mean - mean) <= 4 * np.sqrt(np.diag(cov) / N))
        for i in range(2):
            for j in range(2):
                band = 4 * np.sqrt((cov[i, i] * cov[j, j] + cov[i, j] ** 2) / N)
                assert abs(g.cov[i, j] - cov[i, j]) <= band

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            fit_gaussian_ml(np.array([[1.0, 2.0]]))


class TestRelativeError:
    def test_exact_match(self):
        assert relative_error(np.eye(2), np.eye(2)) == 0.0

    def test_scaling(self):
        assert relative_error(2 * np.eye(2), np.eye(2)) == pytest.approx(1.0)

    def test_hand_frobenius(self):
        got = relative_error(np.diag([1.0, 0.0]), np.eye(2))
        assert got == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)
        assert got == pytest.approx(0.7071068, abs=1e-7)

    def test_zero_truth(self):
        with pytest.raises(ZeroTruth):
            relative_error(np.eye(2), np.zeros((2, 2)))


class TestRunExperiment:
    def test_shape_contract(self):
        cfg = ExperimentConfig(alpha=1.0, trials=2, particles=30, base_seed=5)
        res = run_experiment(cfg)
        assert len(res.rows) == 3 * cfg.horizon
        for row in res.rows:
            assert row["method"] in ("alg4", "sbid", "sbtvid")
            assert 0 <= row["k"] < cfg.horizon
            assert row["mean_rel_err"] >= 0.0
            assert row["std_rel_err"] >= 0.0
            assert row["n_success"] == 2

    def test_determinism(self):
        cfg = ExperimentConfig(alpha=0.5, trials=2, particles=25, base_seed=11)
        assert run_experiment(cfg).rows == run_experiment(cfg).rows

    def test_trial_seeds_are_derived(self):
        cfg = ExperimentConfig(alpha=1.0, trials=3, particles=20, base_seed=100)
        res = run_experiment(cfg)
        assert [t.seed for t in res.trials] == [100, 101, 102]
        assert res.metadata["trial_seeds"] == [100, 101, 102]

    def test_method_subset(self):
        cfg = ExperimentConfig(alpha=1.0, trials=1, particles=20, methods=("sbid",))
        res = run_experiment(cfg)
        assert {row["method"] for row in res.rows} == {"sbid"}

    def test_config_validation(self):
        with pytest.raises(BadRange):
            ExperimentConfig(alpha=-1.0)
        with pytest.raises(BadRange):
            ExperimentConfig(alpha=1.0, particles=1)
        with pytest.raises(BadRange):
            ExperimentConfig(alpha=1.0, methods=("nope",))

    def test_aggregation_matches_direct_computation(self):
        cfg = ExperimentConfig(alpha=1.0, trials=3, particles=25, base_seed=2)
        res = run_experiment(cfg)
        for row in res.rows:
            vals = np.array([t.errors[row["method"]][row["k"]] for t in res.trials])
            assert row["mean_rel_err"] == pytest.approx(vals.mean(), abs=1e-12)
            assert row["std_rel_err"] == pytest.approx(vals.std(), abs=1e-12)
