"""Exception types raised by lipsmooth."""


class LipSmoothError(Exception):
    """Base class for all library errors."""


class ParameterError(LipSmoothError, ValueError):
    """A numeric parameter is outside its admissible range."""


class DomainError(LipSmoothError, ValueError):
    """Input function violates an operation's precondition (sign, range, slope)."""


class GridMismatchError(LipSmoothError, ValueError):
    """Two grid functions that must share box and shape do not."""


class EvaluationError(LipSmoothError, ArithmeticError):
    """An oracle produced a non-finite value."""


class ResolutionError(LipSmoothError):
    """Grid too coarse for the requested smoothing scale.

    ``required_shape`` carries the smallest admissible shape when known.
    """

    def __init__(self, message, required_shape=None):
        super().__init__(message)
        self.required_shape = required_shape


class CertificationError(LipSmoothError):
    """A mollifier could not be certified within the search budget."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)
