"""
Verification oracles for small L1 regression instances.
"""

import itertools
import logging

import numpy as np
from numpy.typing import ArrayLike

from app.core.exceptions import DimensionMismatchError, DomainError, SingularSystemError
from app.numerics import Vector, as_vector
from app.solvers.admm import validate_regression_inputs

logger = logging.getLogger(__name__)

MAX_ORACLE_ROWS = 12
MAX_ORACLE_COLUMNS = 3


def oracle_l1_enum(X: ArrayLike, y: ArrayLike) -> Vector:
    """
    Exact argmin_w ‖y − Xw‖₁ by enumerating every n-subset of rows and
    interpolating it. The first subset (lexicographic order) attaining the
    minimum wins.
    """
    X, y = validate_regression_inputs(X, y)
    m, n = X.shape
    if m > MAX_ORACLE_ROWS or n > MAX_ORACLE_COLUMNS:
        raise DomainError(
            f"oracle enumeration is limited to m <= {MAX_ORACLE_ROWS}, n <= {MAX_ORACLE_COLUMNS}; got {m}x{n}"
        )
    if m < n:
        raise DomainError(f"oracle needs m >= n, got {m}x{n}")

    best = None
    best_value = np.inf
    singular = 0
    for rows in itertools.combinations(range(m), n):
        rows = list(rows)
        try:
            w = np.linalg.solve(X[rows], y[rows])
        except np.linalg.LinAlgError:
            singular += 1
            continue
        value = float(np.sum(np.abs(y - X @ w)))
        if value < best_value:
            best, best_value = w, value

    if best is None:
        raise SingularSystemError(f"all {singular} interpolation subsets are singular")
    return best


def _grouped_cumulative(values: ArrayLike, weights: ArrayLike):
    values = as_vector(values, "values")
    weights = as_vector(weights, "weights")
    if values.shape[0] != weights.shape[0]:
        raise DimensionMismatchError(f"{values.shape[0]} values but {weights.shape[0]} weights")
    if np.any(weights < 0.0):
        raise DomainError("weights must be non-negative")
    total = float(np.sum(weights))
    if total <= 0.0:
        raise DomainError("weights must not all be zero")

    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    cumulative = np.cumsum(weights[order])
    # last position of every run of equal values carries that group's weight
    group_end = np.append(sorted_values[1:] != sorted_values[:-1], True)
    return sorted_values[group_end], cumulative[group_end], total


def weighted_median(values: ArrayLike, weights: ArrayLike) -> float:
    """Smallest v in values with weight{values ≤ v} ≥ total/2."""
    if np.size(values) == 0:
        raise DomainError("weighted_median of an empty input")
    group_values, cumulative, total = _grouped_cumulative(values, weights)
    index = int(np.argmax(2.0 * cumulative >= total))
    return float(group_values[index])


def weighted_median_is_unique(values: ArrayLike, weights: ArrayLike, rtol: float = 1e-12) -> bool:
    """
    False when some group of equal values splits the weight exactly in half,
    in which case every point between it and the next value minimizes
    Σ wᵢ|vᵢ − t|.
    """
    if np.size(values) == 0:
        raise DomainError("weighted_median of an empty input")
    _, cumulative, total = _grouped_cumulative(values, weights)
    split = np.abs(2.0 * cumulative[:-1] - total) <= rtol * total
    return not bool(split.any())
