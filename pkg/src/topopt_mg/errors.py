"""Exception hierarchy shared by every module of the package."""


class TopoptError(Exception):
    """Base class for all package errors."""


class ConfigurationError(TopoptError, ValueError):
    """Invalid configuration value or inconsistent parameters."""


class DimensionError(TopoptError, ValueError):
    """Array or matrix sizes do not agree."""


class NumericalError(TopoptError, ArithmeticError):
    """Base class for failures of a numerical algorithm."""


class NotPositiveDefiniteError(NumericalError):
    """A pivot or curvature term was not strictly positive.

    Attributes
    ----------
    row : int or None
        Zero-based row of the failing pivot, when known.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class SplittingError(NumericalError):
    """Matrix splitting needs a strictly positive diagonal."""


class PreconditionerError(NumericalError):
    """The preconditioned residual produced z^T r <= 0."""


class MultiplierError(NumericalError):
    """Bisection for the volume multiplier failed to hit the target."""
