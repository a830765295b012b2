"""
Solver Pydantic Schemas
"""
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import get_settings


class TerminationReason(str, Enum):
    CONVERGED = "converged"
    CERTIFIED_OPTIMAL = "certified_optimal"
    MAX_ITERATIONS = "max_iterations"
    FIXED_POINT = "fixed_point"
    CLOSED_FORM = "closed_form"
    VARIANCE_THRESHOLD = "variance_threshold"


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iterations: int = Field(default=50_000, ge=1)
    primal_tolerance: float = Field(default=1e-8, gt=0.0)
    dual_tolerance: float = Field(default=1e-8, gt=0.0)
    relative_tolerance: float = Field(default=1e-6, ge=0.0)
    penalty: float = Field(default=1.0, gt=0.0)
    adaptive_penalty: bool = True
    polish: bool = True
    burn_in: int = Field(default=10, ge=0)

    irls_smoothing: float = Field(default=1e-2, gt=0.0)
    irls_smoothing_floor: float = Field(default=1e-8, gt=0.0)
    irls_max_iterations: int = Field(default=500, ge=1)
    lp_restarts: int = Field(default=20, ge=0)

    filter_constant: float = Field(default=2.0, ge=0.0)
    filter_base_variance: float = Field(default=0.0, ge=0.0)  # 0 = estimate from the ratios

    seed: int = Field(default=0, ge=0)

    @classmethod
    def from_settings(cls, **overrides) -> "SolverOptions":
        s = get_settings()
        values = dict(
            max_iterations=s.max_iterations,
            primal_tolerance=s.primal_tolerance,
            dual_tolerance=s.dual_tolerance,
            relative_tolerance=s.relative_tolerance,
            penalty=s.penalty,
            adaptive_penalty=s.adaptive_penalty,
            polish=s.polish,
            irls_smoothing=s.irls_smoothing,
            irls_smoothing_floor=s.irls_smoothing_floor,
            irls_max_iterations=s.irls_max_iterations,
            lp_restarts=s.lp_restarts,
            filter_constant=s.filter_constant,
        )
        values.update(overrides)
        return cls(**values)


class SolverResult(BaseModel):
    """
    Estimate plus diagnostics. `objective` is ‖y − Xŵ‖₁ for every method
    except lp regression, which reports Σ|rᵢ|^p.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method: str
    estimate: np.ndarray
    iterations: int = Field(ge=0)
    objective: float = Field(ge=0.0)
    converged: bool
    termination_reason: TerminationReason
    final_primal_residual: float = 0.0
    final_dual_residual: float = 0.0
    primal_threshold: float = 0.0
    dual_threshold: float = 0.0
    residual_history: List[float] = Field(default_factory=list)
    objective_history: List[float] = Field(default_factory=list)
    monotonicity_violations: int = 0
    objective_increases: int = 0
    polished: bool = False
    survivors: Optional[int] = None

    @model_validator(mode="after")
    def check_convergence(self) -> "SolverResult":
        if self.termination_reason == TerminationReason.CONVERGED and self.converged and (
            self.final_primal_residual > self.primal_threshold
            or self.final_dual_residual > self.dual_threshold
        ):
            raise ValueError("converged result must have residuals within their thresholds")
        return self

    def summary(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "objective": self.objective,
            "converged": self.converged,
            "termination_reason": self.termination_reason.value,
            "final_primal_residual": self.final_primal_residual,
            "final_dual_residual": self.final_dual_residual,
            "monotonicity_violations": self.monotonicity_violations,
            "objective_increases": self.objective_increases,
            "polished": self.polished,
        }


class SolveRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    X: List[List[float]]
    y: List[float]
    method: str = "l1"
    lam: Optional[float] = Field(default=None, alias="lambda")
    p: Optional[float] = None
    eta: Optional[float] = None


class SolveResponse(BaseModel):
    method: str
    estimate: List[float]
    objective: float
    iterations: int
    converged: bool
    termination_reason: TerminationReason
