"""Pydantic request/response models for the HTTP service."""

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

Matrix = list[list[float]]
Vector = list[float]


class LinearSystemModel(BaseModel):
    T: int
    A: Union[Matrix, list[Matrix]]
    B: Union[Matrix, list[Matrix]]
    n: Optional[int] = None
    m: Optional[int] = None


class GaussianModel(BaseModel):
    mean: Vector
    cov: Matrix


class ProblemModel(BaseModel):
    system: LinearSystemModel
    Sigma_ini: Matrix
    Sigma_fin: Matrix
    mu_ini: Optional[Vector] = None
    mu_fin: Optional[Vector] = None


class SolveRequest(BaseModel):
    problem: ProblemModel
    iters: int = Field(default=10, ge=1, le=10_000)
    stop_tol: Optional[float] = Field(default=None, gt=0)


class PolicyModel(BaseModel):
    P: list[Matrix]
    q: list[Vector]
    Sigma: list[Matrix]


class PriorModel(BaseModel):
    mu: list[Vector]
    Sigma: list[Matrix]


class IterationModel(BaseModel):
    iteration: int
    objective_after_policy: Optional[float]
    objective_after_prior: Optional[float]
    terminal_cov_error: float
    terminal_mean_error: float
    prior_spectra: list[Vector]


class SolveResponse(BaseModel):
    iterations: list[IterationModel]
    policy: Optional[PolicyModel]
    prior: Optional[PriorModel]
    mean_input: Optional[list[Vector]]
    mean_trajectory: Optional[list[Vector]]
    stopped_early: bool
    failure: Optional[dict] = None


class SnapshotsModel(BaseModel):
    initial: GaussianModel
    final: GaussianModel


class EstimateRequest(BaseModel):
    system: LinearSystemModel
    snapshots: SnapshotsModel
    method: Literal["alg4", "sbid", "sbtvid"]
    iters: int = Field(default=10, ge=1, le=10_000)
    init_ref: Optional[GaussianModel] = None


class EstimateResponse(BaseModel):
    method: str
    time_invariant: bool
    noise: list[Matrix]
    diagnostics: list[dict]


class ExperimentRequest(BaseModel):
    alpha: float = Field(gt=0)
    horizon: int = 10
    state_dim: int = 2
    particles: int = 100
    trials: int = 10
    alt_iters: int = 10
    seed: int = 0
    methods: list[Literal["alg4", "sbid", "sbtvid"]] = ["alg4", "sbid", "sbtvid"]


class ExperimentRow(BaseModel):
    k: int
    method: str
    mean_rel_err: Optional[float]
    std_rel_err: Optional[float]
    n_success: int


class ExperimentResponse(BaseModel):
    rows: list[ExperimentRow]
    metadata: dict


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[CheckModel]


class ErrorModel(BaseModel):
    error: str
    detail: str
