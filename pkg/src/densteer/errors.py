"""Typed errors raised by the solver layers.

Every contract violation gets its own class so that callers (and the HTTP
layer) can report which hypothesis broke instead of a generic failure.
"""


class SteeringError(Exception):
    """Base class for all densteer errors."""


class DimensionMismatch(SteeringError):
    pass


class NotSymmetric(SteeringError):
    pass


class NotPSD(SteeringError):
    pass


class NotPD(SteeringError):
    pass


class DegenerateReference(SteeringError):
    """Reference covariance of a KL divergence is not strictly PD."""


class DegenerateCovariance(SteeringError):
    """Covariance is singular where a density is required."""


class BadRange(SteeringError):
    pass


class SingularA(SteeringError):
    """A state matrix is not invertible but a backward transition was requested."""


class SingularGramian(SteeringError):
    pass


class SingularF(SteeringError):
    """Terminal weight matrix is not invertible."""


class RankDeficientB(SteeringError):
    """An input matrix is not full column rank."""


class TooFewSamples(SteeringError):
    pass


class ZeroTruth(SteeringError):
    pass


class InfeasibleRiccati(SteeringError):
    """Positivity required by the backward recursion failed at some step."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"Riccati positivity failed at step {index}")


class AssumptionViolated(SteeringError):
    """A named hypothesis of the terminal-weight construction failed.

    ``which`` identifies the hypothesis; ``index`` the step, when relevant;
    ``iteration`` the alternating-optimization iteration, when relevant.
    """

    def __init__(self, which, index=None, iteration=None):
        self.which = which
        self.index = index
        self.iteration = iteration
        parts = [which]
        if index is not None:
            parts.append(f"step {index}")
        if iteration is not None:
            parts.append(f"iteration {iteration}")
        super().__init__(": ".join(parts))
