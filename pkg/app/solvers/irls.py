"""
ℓp Regression (0 < p < 1)
=========================

Heuristic minimization of Σ|yᵢ − ⟨xᵢ, w⟩|^p by iteratively reweighted least
squares on the smoothed objective Σ(rᵢ² + μ²)^{p/2}, started from the L1
solution. μ begins at irls_smoothing·RMS(initial residuals), halves whenever
the smoothed objective stops decreasing and is floored at irls_smoothing_floor.

The true objective is concave on every cell of fixed residual signs, so its
minima sit at basic solutions. In one dimension every breakpoint yᵢ/xᵢ is
evaluated; otherwise random basic solutions seed extra IRLS runs and the
lowest true objective wins.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from app.core.exceptions import DomainError, RankDeficientError
from app.numerics import Matrix, Vector
from app.solvers.admm import l1_regress, validate_regression_inputs
from app.solvers.schemas import SolverOptions, SolverResult, TerminationReason

logger = logging.getLogger(__name__)

_STALL_TOLERANCE = 1e-12


def lp_objective(residual: Vector, p: float) -> float:
    return float(np.sum(np.abs(residual) ** p))


def _smoothed_objective(residual: Vector, p: float, mu: float) -> float:
    return float(np.sum((residual ** 2 + mu ** 2) ** (p / 2.0)))


@dataclass
class _IrlsRun:
    estimate: Vector
    objective: float
    iterations: int
    converged: bool
    last_decrease: float


def _irls(X: Matrix, y: Vector, p: float, start: Vector, opts: SolverOptions) -> _IrlsRun:
    w = start.copy()
    r = y - X @ w
    rms = float(np.sqrt(np.mean(r ** 2)))
    if rms == 0.0:
        return _IrlsRun(w, 0.0, 0, True, 0.0)

    mu = max(opts.irls_smoothing * rms, opts.irls_smoothing_floor)
    smoothed = _smoothed_objective(r, p, mu)
    best_w, best_obj = w.copy(), lp_objective(r, p)
    decrease = math.inf
    converged = False
    iteration = 0

    for iteration in range(1, opts.irls_max_iterations + 1):
        weights = (r ** 2 + mu ** 2) ** (p / 2.0 - 1.0)
        root = np.sqrt(weights / weights.max())
        w_new, _, rank, _ = scipy.linalg.lstsq(X * root[:, None], y * root, lapack_driver="gelsd")
        if rank < X.shape[1]:
            break
        w = w_new
        r = y - X @ w

        value = _smoothed_objective(r, p, mu)
        decrease = (smoothed - value) / max(smoothed, 1e-300)
        smoothed = value

        true_obj = lp_objective(r, p)
        if true_obj < best_obj:
            best_w, best_obj = w.copy(), true_obj

        if decrease <= _STALL_TOLERANCE:
            if mu <= opts.irls_smoothing_floor:
                converged = True
                break
            mu = max(mu / 2.0, opts.irls_smoothing_floor)
            smoothed = _smoothed_objective(r, p, mu)

    return _IrlsRun(best_w, best_obj, iteration, converged, max(decrease, 0.0))


def _basic_solution(X: Matrix, y: Vector, rows: np.ndarray) -> Optional[Vector]:
    try:
        w = np.linalg.solve(X[rows], y[rows])
    except np.linalg.LinAlgError:
        return None
    return w if np.all(np.isfinite(w)) else None


def lp_regress(
    X: ArrayLike,
    y: ArrayLike,
    p: float,
    opts: Optional[SolverOptions] = None,
) -> SolverResult:
    """Heuristic minimizer of Σ|yᵢ − ⟨xᵢ, w⟩|^p for 0 < p < 1."""
    X, y = validate_regression_inputs(X, y)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    m, n = X.shape
    if m < n:
        raise RankDeficientError(f"lp_regress needs m >= n, got {m}x{n}")
    opts = opts or SolverOptions.from_settings()

    start = l1_regress(X, y, opts)
    residual = y - X @ start.estimate
    if not np.any(residual):
        return SolverResult(
            method="lp",
            estimate=start.estimate,
            iterations=start.iterations,
            objective=0.0,
            converged=True,
            termination_reason=TerminationReason.CONVERGED,
        )

    best = _irls(X, y, p, start.estimate, opts)
    total_iterations = start.iterations + best.iterations

    if n == 1:
        x = X[:, 0]
        nonzero = np.flatnonzero(x)
        for i in nonzero:
            candidate = np.array([y[i] / x[i]])
            value = lp_objective(y - x * candidate[0], p)
            # breakpoints are exact, so they also displace an unconverged run at equal cost
            if value < best.objective or (not best.converged and value <= best.objective):
                best = _IrlsRun(candidate, value, 0, True, 0.0)
        logger.debug(f"lp: evaluated {nonzero.shape[0]} breakpoints, best objective {best.objective:.12g}")
    else:
        rng = np.random.Generator(np.random.Philox(opts.seed))
        for _ in range(opts.lp_restarts):
            rows = rng.choice(m, size=n, replace=False)
            vertex = _basic_solution(X, y, rows)
            if vertex is None:
                continue
            vertex_obj = lp_objective(y - X @ vertex, p)
            run = _irls(X, y, p, vertex, opts)
            total_iterations += run.iterations
            if vertex_obj < run.objective:
                run = _IrlsRun(vertex, vertex_obj, run.iterations, run.converged, run.last_decrease)
            if run.objective < best.objective:
                best = run

    if not best.converged:
        logger.warning(f"lp: smoothing did not reach its floor within {opts.irls_max_iterations} iterations")

    return SolverResult(
        method="lp",
        estimate=best.estimate,
        iterations=total_iterations,
        objective=best.objective,
        converged=best.converged,
        termination_reason=TerminationReason.CONVERGED if best.converged else TerminationReason.MAX_ITERATIONS,
        final_primal_residual=best.last_decrease,
        primal_threshold=_STALL_TOLERANCE if best.converged else 0.0,
    )
