from app.core.config import get_settings, settings
from app.core.exceptions import (
    RobustRegressionError,
    DomainError,
    DimensionMismatchError,
    NotPositiveDefiniteError,
    RankDeficientError,
)

__all__ = [
    "get_settings",
    "settings",
    "RobustRegressionError",
    "DomainError",
    "DimensionMismatchError",
    "NotPositiveDefiniteError",
    "RankDeficientError",
]
