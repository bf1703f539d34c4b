"""Exception types shared across the package."""


class SigmaflowError(Exception):
    """Base class for all package errors."""


class DegenerateMetricError(SigmaflowError):
    """Metric evaluation produced a non positive-definite matrix."""


class DomainError(SigmaflowError):
    """A point lies outside the chart domain (or a stencil leaves it)."""


class ConvexityError(SigmaflowError):
    """Two points violate the documented max-separation guard."""


class ShootingError(SigmaflowError):
    """Geodesic boundary-value solve failed to converge."""

    def __init__(self, message, last_residual=None):
        super().__init__(message)
        self.last_residual = last_residual


class SingularEvaluationError(SigmaflowError):
    """Kernel evaluated at coincidence where it is logarithmically singular."""


class AxiomViolationError(SigmaflowError):
    """A structure expected to satisfy the Wick-power axioms does not."""
