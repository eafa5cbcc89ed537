"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: validation problems exit 1,
accuracy/resolution problems exit 2.
"""


class SsopsError(Exception):
    """Base class for toolkit errors."""


class DomainError(SsopsError, ValueError):
    """Input outside the domain where an operation is defined."""


class PoleError(DomainError):
    """Gamma evaluated at a non-positive integer."""


class ValidationError(SsopsError, ValueError):
    """Malformed input data (bad field file, zero test family, ...)."""


class AccuracyError(SsopsError, ArithmeticError):
    """Requested accuracy could not be reached.

    ``achieved`` carries the error estimate that was obtained.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class ResolutionError(SsopsError, ArithmeticError):
    """Grid or time step too coarse for the requested computation."""
