"""densteer: density steering and Schrodinger bridges for discrete-time
linear systems, with snapshot-based noise-covariance estimation."""

__version__ = "0.1.0"

from .config import DEFAULT, Tolerances
from .errors import (
    AssumptionViolated,
    BadRange,
    DegenerateCovariance,
    DegenerateReference,
    DimensionMismatch,
    InfeasibleRiccati,
    NotPD,
    NotPSD,
    NotSymmetric,
    RankDeficientB,
    SingularA,
    SingularF,
    SingularGramian,
    SteeringError,
    TooFewSamples,
    ZeroTruth,
)
from .gaussian import (
    Gaussian,
    gaussian_entropy,
    kl_gaussian,
    kl_gaussian_on_support,
    pseudo_inverse,
    spd_sqrt,
)
from .linsys import (
    AffinePolicy,
    GaussianPrior,
    LinearSystem,
    MomentTrajectory,
    controllability_gramian,
    propagate_moments,
    reachability_gramian,
    state_transition,
)
from .maxent import (
    RiccatiSolution,
    TerminalWeightSolution,
    me_density_policy,
    me_policy,
    me_terminal_weight,
    riccati_me,
    riccati_with_prior,
)
from .mi_control import (
    AlternationTrace,
    DensitySteeringProblem,
    GeneralAlternation,
    MeanSteering,
    alternate_midc,
    alternate_midc_general,
    effective_input_matrix,
    mean_steering,
    mi_policy_for_prior,
    mi_policy_nonzero_mean_prior,
    mi_prior_for_policy,
    objective_j,
    reduce_weighted_cost,
)
from .bridge import (
    BridgeTrace,
    NoiseEstimate,
    ProcessDistribution,
    Trajectory,
    alternate_sb,
    alternate_sb_general,
    controlled_process,
    expected_potential,
    kl_process,
    potential_v,
    process_marginals,
    reference_process,
    sb_objective,
    sbid_estimate,
    sbtvid_estimate,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    fit_gaussian_ml,
    relative_error,
    run_experiment,
    simulate_particles,
    true_noise_cov,
)
