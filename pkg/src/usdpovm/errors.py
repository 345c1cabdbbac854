"""Exception types shared across the package."""


class DiscriminationError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitianError(DiscriminationError):
    """Input matrix fails the Hermitian symmetry check."""


class NotPositiveSemidefiniteError(DiscriminationError):
    """Matrix has an eigenvalue below the allowed clamping window."""


class SingularMatrixError(DiscriminationError):
    """Matrix is singular or too ill-conditioned to invert; for state
    matrices this signals linearly dependent states."""


class NoConvergenceError(DiscriminationError):
    """An iterative factorization failed to converge."""


class DimensionMismatchError(DiscriminationError):
    """Inconsistent array dimensions between related inputs."""


class DomainError(DiscriminationError, ValueError):
    """A parameter lies outside its validity domain; the message names
    the violated constraint."""


class InfeasibleWeightsError(DiscriminationError):
    """Weights violate the positive-semidefiniteness existence condition."""


class RankDeficientError(DiscriminationError):
    """A construction needs full rank that the input does not have."""


class NotCompletionError(DiscriminationError):
    """Detector and ancilla factors do not complete the identity."""


class BudgetExceededError(DiscriminationError):
    """An exhaustive evaluation would exceed the configured budget."""
