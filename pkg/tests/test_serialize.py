import json

import numpy as np
import pytest

from densteer import DensitySteeringProblem, DimensionMismatch, LinearSystem
from densteer.serialize import (
    canonical_json,
    experiment_csv,
    noise_csv,
    problem_from_doc,
    problem_to_doc,
    system_from_doc,
    system_to_doc,
)


class TestSystemDocuments:
    def test_time_invariant_shorthand_round_trip(self):
        sys = LinearSystem(np.array([[0.9, 0.1], [0.0, 1.1]]), np.eye(2), 5)
        doc = system_to_doc(sys)
        # identical matrices collapse to the single-matrix shorthand
        assert np.asarray(doc["A"]).ndim == 2
        back = system_from_doc(doc)
        assert back.T == 5
        for a, b in zip(sys.A, back.A):
            assert np.array_equal(a, b)

    def test_time_varying_round_trip(self):
        rng = np.random.default_rng(0)
        A = [rng.standard_normal((2, 2)) for _ in range(3)]
        B = [rng.standard_normal((2, 1)) for _ in range(3)]
        sys = LinearSystem(A, B, 3)
        back = system_from_doc(system_to_doc(sys))
        for a, b in zip(sys.A, back.A):
            assert np.array_equal(a, b)
        for a, b in zip(sys.B, back.B):
            assert np.array_equal(a, b)

    def test_declared_dims_checked(self):
        doc = {"T": 2, "n": 3, "m": 1, "A": [[1.0]], "B": [[1.0]]}
        with pytest.raises(DimensionMismatch):
            system_from_doc(doc)


class TestProblemDocuments:
    def test_round_trip_with_means(self):
        sys = LinearSystem(np.eye(2), np.eye(2), 3)
        prob = DensitySteeringProblem(
            sys, [0.5, -1.0], np.eye(2), [1.0, 0.0], 2.0 * np.eye(2)
        )
        back = problem_from_doc(problem_to_doc(prob))
        assert np.array_equal(back.mu_ini, prob.mu_ini)
        assert np.array_equal(back.Sigma_fin, prob.Sigma_fin)

    def test_means_default_to_zero(self):
        doc = {
            "system": {"T": 2, "A": [[1.0]], "B": [[1.0]]},
            "Sigma_ini": [[1.0]],
            "Sigma_fin": [[2.0]],
        }
        prob = problem_from_doc(doc)
        assert prob.zero_means


class TestProcessDocuments:
    def test_round_trip(self):
        from densteer import Gaussian, GaussianPrior, reference_process
        from densteer.serialize import process_from_doc, process_to_doc

        sys = LinearSystem(np.array([[0.9]]), np.array([[1.2]]), 3)
        proc = reference_process(sys, GaussianPrior.identity(1, 3), Gaussian([0.1], [[1.0]]))
        back = process_from_doc(process_to_doc(proc))
        assert np.array_equal(back.initial.mean, proc.initial.mean)
        for a, b in zip(back.noise_covs, proc.noise_covs):
            assert np.array_equal(a, b)
        for a, b in zip(back.transitions, proc.transitions):
            assert np.array_equal(a, b)


class TestCanonicalText:
    def test_canonical_json_sorted_and_stable(self):
        a = canonical_json({"b": 1.5, "a": [1, 2]})
        b = canonical_json({"a": [1, 2], "b": 1.5})
        assert a == b
        assert a.index('"a"') < a.index('"b"')
        assert a.endswith("\n")

    def test_canonical_json_rejects_nan(self):
        with pytest.raises(ValueError):
            canonical_json({"x": float("nan")})

    def test_noise_csv_layout(self):
        text = noise_csv([np.array([[2.0, 0.0], [0.0, 1.0]])])
        lines = text.split("\r\n")
        assert lines[0] == "k,theta_00,theta_01,theta_10,theta_11,spectral_norm,eig_0,eig_1"
        cells = lines[1].split(",")
        assert cells[0] == "0"
        assert float(cells[5]) == 2.0  # spectral norm
        assert [float(cells[6]), float(cells[7])] == [1.0, 2.0]

    def test_experiment_csv_full_precision(self):
        rows = [
            {
                "k": 0,
                "method": "alg4",
                "mean_rel_err": 1.0 / 3.0,
                "std_rel_err": 0.1,
                "n_success": 10,
            }
        ]
        text = experiment_csv(rows)
        lines = text.split("\r\n")
        assert lines[0] == "k,method,mean_rel_err,std_rel_err,n_success"
        assert "0.33333333333333331" in lines[1]

    def test_json_floats_round_trip(self):
        payload = {"x": 0.1 + 0.2, "y": [1e-17, 123456.789]}
        again = json.loads(canonical_json(payload))
        assert again["x"] == payload["x"]
        assert again["y"] == payload["y"]
