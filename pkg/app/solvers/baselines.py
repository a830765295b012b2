"""
Non-robust and Robust Baselines
===============================

least_squares   - normal-equations fit, the non-robust reference
torrent_iht     - alternating hard thresholding on residuals
filter_regress_1d - iterative filtering of 1-D ratio samples
"""

import logging
import math
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from app.core.exceptions import (
    DimensionMismatchError,
    DomainError,
    EmptySurvivorError,
    NotPositiveDefiniteError,
    RankDeficientError,
)
from app.numerics import Vector, as_vector, sorted_abs_order, spd_factor
from app.solvers.admm import l1_objective, validate_regression_inputs
from app.solvers.oracles import weighted_median
from app.solvers.schemas import SolverOptions, SolverResult, TerminationReason

logger = logging.getLogger(__name__)

# MAD of a Gaussian sample times this estimates its standard deviation.
_MAD_TO_SIGMA = 1.4826


def least_squares(X: ArrayLike, y: ArrayLike) -> SolverResult:
    """argmin_w ‖y − Xw‖₂ through a Cholesky factor of XᵀX."""
    X, y = validate_regression_inputs(X, y)
    m, n = X.shape
    if m < n:
        raise RankDeficientError(f"least_squares needs m >= n, got {m}x{n}")
    try:
        factor = spd_factor(X.T @ X)
    except NotPositiveDefiniteError as e:
        raise RankDeficientError(f"X ({m}x{n}) does not have full column rank") from e

    w = factor.solve(X.T @ y)
    return SolverResult(
        method="least_squares",
        estimate=w,
        iterations=1,
        objective=l1_objective(X, y, w),
        converged=True,
        termination_reason=TerminationReason.CLOSED_FORM,
    )


def torrent_iht(
    X: ArrayLike,
    y: ArrayLike,
    eta: float,
    opts: Optional[SolverOptions] = None,
) -> SolverResult:
    """
    Fit least squares on the trusted rows, then trust the (1−η)m rows with
    smallest residual, until the trusted set stops changing.
    Residual ties keep the lower index.
    """
    X, y = validate_regression_inputs(X, y)
    if not (math.isfinite(eta) and 0.0 <= eta < 0.5):
        raise DomainError(f"torrent eta must lie in [0, 0.5), got {eta}")
    opts = opts or SolverOptions.from_settings()
    m, n = X.shape

    keep = m - int(math.floor(eta * m + 1e-9))
    if keep < n:
        raise RankDeficientError(f"torrent keeps {keep} rows, fewer than n={n}")

    trusted = np.arange(m)
    w = np.zeros(n)
    fixed_point = False
    iteration = 0

    for iteration in range(1, opts.max_iterations + 1):
        w, _, rank, _ = scipy.linalg.lstsq(X[trusted], y[trusted], lapack_driver="gelsd")
        if rank < n:
            raise RankDeficientError(f"trusted rows at iteration {iteration} have rank {rank} < {n}")

        updated = np.sort(sorted_abs_order(y - X @ w, descending=False)[:keep])
        if np.array_equal(updated, trusted):
            fixed_point = True
            break
        trusted = updated

    if not fixed_point:
        logger.warning(f"torrent: trusted set still changing after {iteration} iterations")

    return SolverResult(
        method="torrent",
        estimate=w,
        iterations=iteration,
        objective=l1_objective(X, y, w),
        converged=fixed_point,
        termination_reason=TerminationReason.FIXED_POINT if fixed_point else TerminationReason.MAX_ITERATIONS,
        survivors=keep,
    )


def _weighted_moments(values: Vector, weights: Vector):
    mean = float(np.sum(weights * values) / np.sum(weights))
    variance = float(np.sum(weights * (values - mean) ** 2) / np.sum(weights))
    return mean, variance


def _base_variance(ratios: Vector, weights: Vector) -> float:
    """Squared σ estimate from the weighted median absolute deviation."""
    center = weighted_median(ratios, weights)
    mad = weighted_median(np.abs(ratios - center), weights)
    return (_MAD_TO_SIGMA * mad) ** 2


def filter_regress_1d(
    x: ArrayLike,
    y: ArrayLike,
    eta: float,
    opts: Optional[SolverOptions] = None,
) -> SolverResult:
    """
    Robust 1-D slope from the ratio samples yᵢ/xᵢ weighted by |xᵢ|.

    While the weighted variance exceeds (1 + c·η)·max(base, 1e-12·mean²),
    drop the single sample farthest from the weighted mean (lowest index on
    ties). `base` is `opts.filter_base_variance` when positive, otherwise
    (1.4826·MAD)² of the ratios, which is zero on noiseless data. Samples
    with xᵢ = 0 carry no information and are skipped. With η = 0 nothing is
    filtered.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        if x.shape[1] != 1:
            raise DimensionMismatchError(f"filter_regress_1d needs a single column, got {x.shape[1]}")
        x = x[:, 0]
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"x has length {x.shape[0]} but y has length {y.shape[0]}")
    if not (math.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    opts = opts or SolverOptions.from_settings()

    usable = np.flatnonzero(x)
    if usable.shape[0] == 0:
        raise EmptySurvivorError("every x entry is zero; no ratio samples to filter")
    ratios = y[usable] / x[usable]
    weights = np.abs(x[usable])

    alive = np.ones(usable.shape[0], dtype=bool)
    mean, variance = _weighted_moments(ratios, weights)
    base = opts.filter_base_variance or _base_variance(ratios, weights)
    removed = 0
    scale = 1.0 + opts.filter_constant * eta

    while eta > 0.0:
        threshold = scale * max(base, 1e-12 * mean ** 2)
        if variance <= threshold:
            break
        deviation = np.where(alive, (ratios - mean) ** 2, -np.inf)
        alive[int(np.argmax(deviation))] = False
        removed += 1
        if not alive.any():
            raise EmptySurvivorError("filtering removed every sample")
        mean, variance = _weighted_moments(ratios[alive], weights[alive])

    estimate = np.array([mean])
    survivors = int(alive.sum())
    logger.debug(f"filter: removed {removed} of {usable.shape[0]} samples, estimate {mean:.12g}")

    return SolverResult(
        method="filter",
        estimate=estimate,
        iterations=removed,
        objective=float(np.sum(np.abs(y - x * mean))),
        converged=True,
        termination_reason=TerminationReason.VARIANCE_THRESHOLD,
        survivors=survivors,
    )
