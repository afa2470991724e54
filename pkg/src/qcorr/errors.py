"""Exception hierarchy shared by every qcorr module."""


class QcorrError(Exception):
    """Base class for all library errors."""


class ShapeError(QcorrError, ValueError):
    """Dimension or Hilbert-space mismatch."""


class DomainError(QcorrError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InvalidStateError(QcorrError, ValueError):
    """Density matrix or covariance matrix violates its physical invariants."""


class TruncationError(QcorrError, ValueError):
    """Fock truncation too small for the requested state or drive."""


class ConfigError(QcorrError, ValueError):
    """Invalid run configuration or parameter record."""


class NumericalError(QcorrError, RuntimeError):
    """A numerical procedure failed."""


class StiffnessError(NumericalError):
    """Adaptive step size underflowed."""


class TraceDriftError(NumericalError):
    """Trace of the density matrix left its tolerance band."""


class StabilityError(NumericalError):
    """Drift matrix is not Hurwitz."""


class LinearizationError(NumericalError):
    """Classical fixed point could not be found."""


class NonConvergenceError(NumericalError):
    """Iterative procedure did not converge within its budget."""


class ConvergenceFailure(QcorrError):
    """Truncation ladder hit its dimension cap before converging."""
