"""Document and file formats.

JSON documents for systems, problems, snapshots and traces; RFC-4180 CSV with
17-significant-digit decimals.  Serialization is canonical (sorted keys,
fixed row order) so identical inputs produce byte-identical files.
"""

import csv
import io
import json

import numpy as np

from .bridge import ProcessDistribution
from .errors import DimensionMismatch
from .gaussian import Gaussian
from .linsys import LinearSystem
from .mi_control import DensitySteeringProblem

__all__ = [
    "system_to_doc",
    "system_from_doc",
    "gaussian_to_doc",
    "gaussian_from_doc",
    "problem_to_doc",
    "problem_from_doc",
    "process_to_doc",
    "process_from_doc",
    "canonical_json",
    "noise_csv",
    "experiment_csv",
]


def _matrix(doc):
    return np.asarray(doc, dtype=float)


def _matrix_seq_to_doc(mats):
    mats = [np.asarray(m) for m in mats]
    if all(np.array_equal(m, mats[0]) for m in mats):
        return mats[0].tolist()
    return [m.tolist() for m in mats]


def system_to_doc(sys: LinearSystem):
    return {
        "T": sys.T,
        "n": sys.n,
        "m": sys.m,
        "A": _matrix_seq_to_doc(sys.A),
        "B": _matrix_seq_to_doc(sys.B),
    }


def _seq_from_doc(doc, T):
    arr = np.asarray(doc, dtype=float)
    if arr.ndim == 2:
        return arr
    return [_matrix(m) for m in doc]


def system_from_doc(doc):
    T = int(doc["T"])
    sys = LinearSystem(_seq_from_doc(doc["A"], T), _seq_from_doc(doc["B"], T), T)
    for key in ("n", "m"):
        if key in doc and int(doc[key]) != getattr(sys, key):
            raise DimensionMismatch(f"declared {key}={doc[key]} does not match matrices")
    return sys


def gaussian_to_doc(g: Gaussian):
    return {"mean": g.mean.tolist(), "cov": g.cov.tolist()}


def gaussian_from_doc(doc):
    return Gaussian(np.asarray(doc["mean"], dtype=float), _matrix(doc["cov"]))


def problem_to_doc(prob: DensitySteeringProblem):
    return {
        "system": system_to_doc(prob.sys),
        "mu_ini": prob.mu_ini.tolist(),
        "Sigma_ini": prob.Sigma_ini.tolist(),
        "mu_fin": prob.mu_fin.tolist(),
        "Sigma_fin": prob.Sigma_fin.tolist(),
    }


def problem_from_doc(doc):
    sys = system_from_doc(doc["system"])
    n = sys.n
    mu_ini = np.asarray(doc.get("mu_ini", np.zeros(n)), dtype=float)
    mu_fin = np.asarray(doc.get("mu_fin", np.zeros(n)), dtype=float)
    return DensitySteeringProblem(
        sys, mu_ini, _matrix(doc["Sigma_ini"]), mu_fin, _matrix(doc["Sigma_fin"])
    )


def process_to_doc(proc: ProcessDistribution):
    return {
        "initial": gaussian_to_doc(proc.initial),
        "transitions": [d.tolist() for d in proc.transitions],
        "offsets": [c.tolist() for c in proc.offsets],
        "noise_covs": [s.tolist() for s in proc.noise_covs],
    }


def process_from_doc(doc):
    return ProcessDistribution(
        gaussian_from_doc(doc["initial"]),
        tuple(_matrix(d) for d in doc["transitions"]),
        tuple(np.asarray(c, dtype=float) for c in doc["offsets"]),
        tuple(_matrix(s) for s in doc["noise_covs"]),
    )


def canonical_json(payload):
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _fmt(x):
    if x is None:
        return "nan"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) and x != x:  # NaN
        return "nan"
    return format(float(x), ".17g")


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(c) if not isinstance(c, str) else c for c in row])
    return buf.getvalue()


def noise_csv(sigmas):
    """Per-step rows: k, flattened covariance, spectral norm, eigenvalues."""
    mats = [np.asarray(s, dtype=float) for s in sigmas]
    m = mats[0].shape[0]
    header = (
        ["k"]
        + [f"theta_{i}{j}" for i in range(m) for j in range(m)]
        + ["spectral_norm"]
        + [f"eig_{i}" for i in range(m)]
    )
    rows = []
    for k, S in enumerate(mats):
        eigs = np.linalg.eigvalsh(S)
        rows.append([k, *S.flatten(), float(eigs[-1]), *eigs])
    return _csv_text(header, rows)


def experiment_csv(rows):
    """Aggregated benchmark table: k, method, mean_rel_err, std_rel_err, n_success."""
    header = ["k", "method", "mean_rel_err", "std_rel_err", "n_success"]
    out = []
    for r in rows:
        out.append([r["k"], r["method"], r["mean_rel_err"], r["std_rel_err"], r["n_success"]])
    return _csv_text(header, out)
