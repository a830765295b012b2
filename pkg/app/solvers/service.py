"""
Solver Service
==============

Name-based dispatch over the estimators plus the recovery metrics the
harness and the HTTP surface share.
"""

import logging
from typing import Callable, Dict, Optional

import numpy as np
from numpy.typing import ArrayLike

from app.core.config import get_settings
from app.core.exceptions import DomainError, UnknownMethodError
from app.core.sentry import set_solver_context
from app.numerics import as_vector
from app.solvers.admm import l1_regress, l1_regress_constrained
from app.solvers.baselines import filter_regress_1d, least_squares, torrent_iht
from app.solvers.irls import lp_regress
from app.solvers.schemas import SolverOptions, SolverResult

logger = logging.getLogger(__name__)


def _require(name: str, value: Optional[float], method: str) -> float:
    if value is None:
        raise DomainError(f"method '{method}' needs parameter '{name}'")
    return value


_Runner = Callable[..., SolverResult]

METHODS: Dict[str, _Runner] = {
    "l1": lambda X, y, opts, **kw: l1_regress(X, y, opts),
    "l1_constrained": lambda X, y, opts, **kw: l1_regress_constrained(
        X, y, _require("lam", kw.get("lam"), "l1_constrained"), opts
    ),
    "lp": lambda X, y, opts, **kw: lp_regress(X, y, _require("p", kw.get("p"), "lp"), opts),
    "least_squares": lambda X, y, opts, **kw: least_squares(X, y),
    "torrent": lambda X, y, opts, **kw: torrent_iht(X, y, _require("eta", kw.get("eta"), "torrent"), opts),
    "filter": lambda X, y, opts, **kw: filter_regress_1d(X, y, _require("eta", kw.get("eta"), "filter"), opts),
}


def check_method(method: str) -> str:
    if method not in METHODS:
        raise UnknownMethodError(f"unknown method '{method}'; expected one of {', '.join(METHODS)}")
    return method


def solve(
    method: str,
    X: ArrayLike,
    y: ArrayLike,
    *,
    lam: Optional[float] = None,
    p: Optional[float] = None,
    eta: Optional[float] = None,
    opts: Optional[SolverOptions] = None,
) -> SolverResult:
    """Run a registered estimator by name."""
    runner = METHODS[check_method(method)]
    opts = opts or SolverOptions.from_settings()
    shape = np.shape(X)
    set_solver_context(method, shape[0] if shape else 0, shape[1] if len(shape) > 1 else 1, lam=lam, p=p, eta=eta)
    logger.info(f"Solving with {method} (lambda={lam}, p={p}, eta={eta})")
    return runner(X, y, opts, lam=lam, p=p, eta=eta)


def relative_error(estimate: ArrayLike, truth: ArrayLike) -> float:
    """‖ŵ − w∗‖₂ / ‖w∗‖₂, or the absolute error when w∗ = 0."""
    estimate = as_vector(estimate, "estimate")
    truth = as_vector(truth, "truth")
    if estimate.shape != truth.shape:
        raise DomainError(f"estimate has shape {estimate.shape}, truth has {truth.shape}")
    scale = float(np.linalg.norm(truth))
    error = float(np.linalg.norm(estimate - truth))
    return error / scale if scale > 0.0 else error


def is_exact_recovery(estimate: ArrayLike, truth: ArrayLike, threshold: Optional[float] = None) -> bool:
    if threshold is None:
        threshold = get_settings().exact_recovery_threshold
    return relative_error(estimate, truth) <= threshold
