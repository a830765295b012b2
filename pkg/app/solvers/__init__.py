"""
Solvers Module
==============

L1 regression (unconstrained and L1-ball constrained), ℓp regression,
non-robust and robust baselines, and exact oracles for small instances.
"""

from app.solvers.schemas import SolverOptions, SolverResult, TerminationReason
from app.solvers.admm import (
    soft_threshold,
    project_l1_ball,
    polish_basic_solution,
    certify_l1_optimal,
    l1_objective,
    l1_regress,
    l1_regress_constrained,
)
from app.solvers.irls import lp_objective, lp_regress
from app.solvers.baselines import least_squares, torrent_iht, filter_regress_1d
from app.solvers.oracles import oracle_l1_enum, weighted_median, weighted_median_is_unique
from app.solvers.service import METHODS, check_method, solve, relative_error, is_exact_recovery

__all__ = [
    "SolverOptions",
    "SolverResult",
    "TerminationReason",
    "soft_threshold",
    "project_l1_ball",
    "polish_basic_solution",
    "certify_l1_optimal",
    "l1_objective",
    "l1_regress",
    "l1_regress_constrained",
    "lp_objective",
    "lp_regress",
    "least_squares",
    "torrent_iht",
    "filter_regress_1d",
    "oracle_l1_enum",
    "weighted_median",
    "weighted_median_is_unique",
    "METHODS",
    "check_method",
    "solve",
    "relative_error",
    "is_exact_recovery",
]
