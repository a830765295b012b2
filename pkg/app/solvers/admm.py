"""
Splitting Solver for L1 Regression
==================================

Solves

    minimize ‖y − Xw‖₁                     (l1_regress)
    minimize ‖y − Xw‖₁  s.t. ‖w‖₁ ≤ λ      (l1_regress_constrained)

with scaled-form ADMM on the splitting z = Xw − y (soft-threshold update)
and, for the constrained problem, a copy v = w projected onto the L1 ball.
The w-update solves (XᵀX)w = rhs, or (XᵀX + I)w = rhs with the copy; the
penalty cancels from both systems, so one Cholesky factor serves the whole
run even when the penalty is rebalanced.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike

from app.core.exceptions import (
    DimensionMismatchError,
    DomainError,
    NotPositiveDefiniteError,
    RankDeficientError,
)
from app.numerics import Matrix, Vector, as_matrix, as_vector, sorted_abs_order, spd_factor
from app.solvers.schemas import SolverOptions, SolverResult, TerminationReason

logger = logging.getLogger(__name__)

# Residual balancing: rescale the penalty when one residual dominates the
# other by this factor, checked every _BALANCE_EVERY iterations and every
# _BALANCE_EVERY_LATE iterations after _BALANCE_EARLY.
_BALANCE_RATIO = 10.0
_BALANCE_FACTOR = 2.0
_BALANCE_EVERY = 10
_BALANCE_EARLY = 5_000
_BALANCE_EVERY_LATE = 200

# Polish and try the LP optimality certificate this often.
_CERTIFY_EVERY = 250

# Fixed-point residual comparisons: relative slack and absolute floor
# (times (1 + ‖y‖)²) for rounding near convergence.
_STEP_RTOL = 1e-6
_STEP_ATOL = 1e-20


# ==================== Proximal Maps ====================

def soft_threshold(v: ArrayLike, theta: float) -> Vector:
    """Componentwise sign(vᵢ)·max(|vᵢ| − θ, 0)."""
    if not theta >= 0.0:
        raise DomainError(f"theta must be non-negative, got {theta}")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def project_l1_ball(v: ArrayLike, lam: float) -> Vector:
    """Euclidean projection onto {u : ‖u‖₁ ≤ λ} (sort-and-threshold)."""
    if not lam >= 0.0:
        raise DomainError(f"lambda must be non-negative, got {lam}")
    v = np.asarray(v, dtype=np.float64)
    a = np.abs(v)
    if a.sum() <= lam:
        return v.copy()
    if lam == 0.0:
        return np.zeros_like(v)

    u = np.sort(a)[::-1]
    cssv = np.cumsum(u) - lam
    ind = np.arange(1, u.shape[0] + 1)
    rho = np.nonzero(u - cssv / ind > 0)[0][-1]
    theta = cssv[rho] / (rho + 1.0)
    w = np.sign(v) * np.maximum(a - theta, 0.0)

    # rounding in theta can leave ‖w‖₁ a few ulps above λ
    total = np.abs(w).sum()
    if total > lam:
        w *= lam / total
    while np.abs(w).sum() > lam:
        w = np.nextafter(w, 0.0)
    return w


# ==================== Shared Helpers ====================

def validate_regression_inputs(X: ArrayLike, y: ArrayLike) -> Tuple[Matrix, Vector]:
    X = as_matrix(X, "X")
    y = as_vector(y, "y")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"X has {X.shape[0]} rows but y has length {y.shape[0]}")
    return X, y


def l1_objective(X: Matrix, y: Vector, w: Vector) -> float:
    return float(np.sum(np.abs(y - X @ w)))


def _norm(v: Vector) -> float:
    return float(np.linalg.norm(v))


class _ProgressTracker:
    """
    Keeps the best iterate and watches two sequences after burn-in:

    - the fixed-point residual ‖Δz‖² + ‖Δu‖² (with the copy and its
      multiplier when constrained), which ADMM keeps non-increasing while
      the penalty is held fixed; increases are `violations`
    - the objective of the raw iterates, which is not monotone on noisy
      data; increases are only counted
    """

    def __init__(self, burn_in: int, scale: float):
        self.burn_in = burn_in
        self.step_floor = _STEP_ATOL * (1.0 + scale) ** 2
        self.best_value = math.inf
        self.best_estimate: Optional[Vector] = None
        self.history = []
        self.previous_step: Optional[float] = None
        self.violations = 0
        self.objective_increases = 0

    def update(self, iteration: int, value: float, estimate: Vector, step: float, penalty_fixed: bool) -> None:
        if iteration > self.burn_in:
            if self.history and value > self.history[-1] + 1e-12 * (1.0 + self.history[-1]):
                self.objective_increases += 1
            previous = self.previous_step
            if penalty_fixed and previous is not None and step > previous * (1.0 + _STEP_RTOL) + self.step_floor:
                self.violations += 1
                logger.debug(f"fixed-point residual increased at iteration {iteration}: {previous:.6e} -> {step:.6e}")
        self.previous_step = step
        self.history.append(value)
        if value < self.best_value:
            self.best_value = value
            self.best_estimate = estimate.copy()


def _closest_rows(X: Matrix, y: Vector, w: Vector) -> np.ndarray:
    """The n rows whose hyperplanes ⟨xᵢ, w⟩ = yᵢ pass closest to w."""
    row_norms = np.linalg.norm(X, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        distance = np.where(row_norms > 0.0, np.abs(y - X @ w) / row_norms, np.inf)
    return sorted_abs_order(distance, descending=False)[:X.shape[1]]


def polish_basic_solution(X: Matrix, y: Vector, w: Vector) -> Tuple[Vector, float, bool]:
    """
    Snap an approximate L1 minimizer to the basic solution interpolating
    the n rows whose hyperplanes pass closest to w, if that does not raise
    the objective. An L1 regression optimum is always attained at such a
    vertex.
    """
    current = l1_objective(X, y, w)
    rows = _closest_rows(X, y, w)
    try:
        candidate = np.linalg.solve(X[rows], y[rows])
    except np.linalg.LinAlgError:
        return w, current, False
    if not np.all(np.isfinite(candidate)):
        return w, current, False

    value = l1_objective(X, y, candidate)
    if value <= current * (1.0 + 1e-12) + 1e-300:
        return candidate, value, True
    return w, current, False


def certify_l1_optimal(X: ArrayLike, y: ArrayLike, w: ArrayLike, tol: float = 1e-9) -> bool:
    """
    LP dual check for a basic solution of min ‖y − Xw‖₁.

    With B the n interpolated rows and N the rest, w is optimal iff the
    multipliers solving X_Bᵀu_B = −X_Nᵀ·sign(r_N) satisfy ‖u_B‖_∞ ≤ 1.
    Returns False, without deciding, when a row outside B also has a
    (near) zero residual.
    """
    X, y = validate_regression_inputs(X, y)
    w = as_vector(w, "w")
    if w.shape[0] != X.shape[1]:
        raise DimensionMismatchError(f"w has length {w.shape[0]} but X has {X.shape[1]} columns")
    return _basic_solution_is_optimal(X, y, w, tol)


def _basic_solution_is_optimal(X: Matrix, y: Vector, w: Vector, tol: float = 1e-9) -> bool:
    m, n = X.shape
    if m <= n:
        return False
    residual = y - X @ w
    rows = _closest_rows(X, y, w)
    outside = np.ones(m, dtype=bool)
    outside[rows] = False

    zero_tol = 1e-9 * (1.0 + float(np.max(np.abs(y))))
    if np.max(np.abs(residual[rows])) > zero_tol or np.min(np.abs(residual[outside])) <= zero_tol:
        return False
    try:
        multipliers = np.linalg.solve(X[rows].T, -X[outside].T @ np.sign(residual[outside]))
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(np.isfinite(multipliers)) and np.max(np.abs(multipliers)) <= 1.0 + tol)


def _balance_due(iteration: int) -> bool:
    if iteration <= _BALANCE_EARLY:
        return iteration % _BALANCE_EVERY == 0
    return iteration % _BALANCE_EVERY_LATE == 0


# ==================== Splitting Method ====================

def _run_splitting(
    X: Matrix,
    y: Vector,
    lam: Optional[float],
    opts: SolverOptions,
    method: str,
) -> SolverResult:
    m, n = X.shape
    constrained = lam is not None

    gram = X.T @ X
    if constrained:
        gram = gram + np.eye(n)
    try:
        factor = spd_factor(gram)
    except NotPositiveDefiniteError as e:
        raise RankDeficientError(f"X ({m}x{n}) does not have full column rank") from e

    rho = opts.penalty
    w = np.zeros(n)
    z = np.zeros(m)
    u = np.zeros(m)
    v = np.zeros(n)
    q = np.zeros(n)

    tracker = _ProgressTracker(opts.burn_in, _norm(y))
    residual_history = []
    converged = False
    certified = False
    rebalanced = False
    can_certify = opts.polish and not constrained and m > n
    primal = dual = eps_pri = eps_dual = math.inf
    iteration = 0

    logger.debug(f"{method}: starting splitting solve m={m} n={n} lambda={lam} penalty={rho}")

    for iteration in range(1, opts.max_iterations + 1):
        rhs = X.T @ (y + z - u)
        if constrained:
            rhs += v - q
        w = factor.solve(rhs)
        Xw = X @ w

        z_old = z
        z = soft_threshold(Xw - y + u, 1.0 / rho)
        r_fit = Xw - y - z
        u = u + r_fit
        step = _norm(z - z_old) ** 2 + _norm(r_fit) ** 2

        if constrained:
            v_old = v
            v = project_l1_ball(w + q, lam)
            r_copy = w - v
            q = q + r_copy
            step += _norm(v - v_old) ** 2 + _norm(r_copy) ** 2
            primal = math.hypot(_norm(r_fit), _norm(r_copy))
            dual = rho * _norm(X.T @ (z - z_old) + (v - v_old))
            scale_pri = max(math.hypot(_norm(Xw), _norm(w)), math.hypot(_norm(z), _norm(v)), _norm(y))
            scale_dual = rho * _norm(X.T @ u + q)
            dims = m + n
            estimate = v
            objective = l1_objective(X, y, v)
        else:
            primal = _norm(r_fit)
            dual = rho * _norm(X.T @ (z - z_old))
            scale_pri = max(_norm(Xw), _norm(z), _norm(y))
            scale_dual = rho * _norm(X.T @ u)
            dims = m
            estimate = w
            objective = float(np.sum(np.abs(Xw - y)))

        eps_pri = math.sqrt(dims) * opts.primal_tolerance + opts.relative_tolerance * scale_pri
        eps_dual = math.sqrt(n) * opts.dual_tolerance + opts.relative_tolerance * scale_dual

        tracker.update(iteration, objective, estimate, step, penalty_fixed=not rebalanced)
        residual_history.append(primal)
        rebalanced = False

        if primal <= eps_pri and dual <= eps_dual:
            converged = True
            break

        if can_certify and iteration > opts.burn_in and iteration % _CERTIFY_EVERY == 0:
            candidate, value, snapped = polish_basic_solution(X, y, w)
            if snapped and _basic_solution_is_optimal(X, y, candidate):
                converged = certified = True
                break

        if opts.adaptive_penalty and _balance_due(iteration):
            if primal > _BALANCE_RATIO * dual:
                rho *= _BALANCE_FACTOR
                u /= _BALANCE_FACTOR
                q /= _BALANCE_FACTOR
                rebalanced = True
            elif dual > _BALANCE_RATIO * primal:
                rho /= _BALANCE_FACTOR
                u *= _BALANCE_FACTOR
                q *= _BALANCE_FACTOR
                rebalanced = True

    polished = False
    if certified:
        final, final_objective, polished = candidate, value, True
    elif converged:
        final, final_objective = estimate.copy(), tracker.history[-1]
    else:
        final, final_objective = tracker.best_estimate, tracker.best_value

    if not certified and opts.polish and not constrained and m >= n:
        final, final_objective, polished = polish_basic_solution(X, y, final)
        if not converged and polished and m > n and _basic_solution_is_optimal(X, y, final):
            converged = certified = True

    if not converged:
        logger.warning(
            f"{method}: no convergence after {iteration} iterations "
            f"(primal {primal:.3e} / {eps_pri:.3e}, dual {dual:.3e} / {eps_dual:.3e})"
        )

    if tracker.violations:
        logger.warning(
            f"{method}: fixed-point residual increased {tracker.violations} times "
            f"at fixed penalty after burn-in"
        )
    if tracker.objective_increases:
        logger.debug(f"{method}: objective increased {tracker.objective_increases} times after burn-in")

    logger.debug(
        f"{method}: finished after {iteration} iterations, objective {final_objective:.12g}, "
        f"converged={converged}, certified={certified}, polished={polished}"
    )

    if certified:
        reason = TerminationReason.CERTIFIED_OPTIMAL
    elif converged:
        reason = TerminationReason.CONVERGED
    else:
        reason = TerminationReason.MAX_ITERATIONS

    return SolverResult(
        method=method,
        estimate=final,
        iterations=iteration,
        objective=final_objective,
        converged=converged,
        termination_reason=reason,
        final_primal_residual=primal,
        final_dual_residual=dual,
        primal_threshold=eps_pri,
        dual_threshold=eps_dual,
        residual_history=residual_history,
        objective_history=tracker.history,
        monotonicity_violations=tracker.violations,
        objective_increases=tracker.objective_increases,
        polished=polished,
    )


def l1_regress(X: ArrayLike, y: ArrayLike, opts: Optional[SolverOptions] = None) -> SolverResult:
    """argmin_w ‖y − Xw‖₁. Needs m ≥ n and full column rank."""
    X, y = validate_regression_inputs(X, y)
    opts = opts or SolverOptions.from_settings()
    if X.shape[0] < X.shape[1]:
        raise RankDeficientError(f"l1_regress needs m >= n, got {X.shape[0]}x{X.shape[1]}")
    return _run_splitting(X, y, None, opts, "l1")


def l1_regress_constrained(
    X: ArrayLike,
    y: ArrayLike,
    lam: float,
    opts: Optional[SolverOptions] = None,
) -> SolverResult:
    """argmin_{‖w‖₁ ≤ λ} ‖y − Xw‖₁."""
    X, y = validate_regression_inputs(X, y)
    if not (math.isfinite(lam) and lam >= 0.0):
        raise DomainError(f"lambda must be a non-negative finite number, got {lam}")
    opts = opts or SolverOptions.from_settings()

    if lam == 0.0:
        zero = np.zeros(X.shape[1])
        return SolverResult(
            method="l1_constrained",
            estimate=zero,
            iterations=0,
            objective=float(np.sum(np.abs(y))),
            converged=True,
            termination_reason=TerminationReason.CLOSED_FORM,
        )
    return _run_splitting(X, y, float(lam), opts, "l1_constrained")
