"""
Exception hierarchy shared by every module.

Parameter and shape errors subclass ValueError so callers that only know
about the builtin still catch them.
"""


class RobustRegressionError(Exception):
    """Base class for errors raised by this package."""


class DomainError(RobustRegressionError, ValueError):
    """A parameter lies outside its admissible range or is not finite."""


class DimensionMismatchError(RobustRegressionError, ValueError):
    """Operand shapes are inconsistent."""


class NotPositiveDefiniteError(RobustRegressionError):
    """Cholesky factorization met a nonpositive pivot."""


class RankDeficientError(RobustRegressionError):
    """Design matrix does not have full column rank."""


class SingularSystemError(RobustRegressionError):
    """Every candidate interpolation system was singular."""


class EmptySurvivorError(RobustRegressionError):
    """A filtering procedure discarded every sample."""


class InvariantViolationError(RobustRegressionError):
    """A constructed object failed its consistency check."""


class ConfigError(RobustRegressionError):
    """A sweep configuration file is missing or malformed."""


class UnknownMethodError(RobustRegressionError, ValueError):
    """A solver name is not registered."""


# Errors caused by the caller's input rather than by the computation.
USAGE_ERRORS = (DomainError, DimensionMismatchError, ConfigError, UnknownMethodError)
