"""
Certificate Pydantic Schemas
"""
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.analytics.schemas import Fraction


class RobustnessReport(BaseModel):
    """
    Monte-Carlo inner approximation of the robustness constants over
    k-sparse unit directions. s_max_estimate is a lower bound on the true
    S^max and s_min_estimate an upper bound on the true S^min.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eta: Fraction
    k: int = Field(ge=1)
    trials: int = Field(ge=1)
    s_min_estimate: float = Field(ge=0.0)
    s_max_estimate: float = Field(ge=0.0)
    witness_min: np.ndarray
    witness_max: np.ndarray
    seed: int

    def to_key_value(self) -> str:
        lines = [
            f"eta={self.eta:.17g}",
            f"k={self.k}",
            f"trials={self.trials}",
            f"s_min_estimate={self.s_min_estimate:.17g}",
            f"s_max_estimate={self.s_max_estimate:.17g}",
            f"seed={self.seed}",
        ]
        return "\n".join(lines) + "\n"


class ShellingBounds(BaseModel):
    """Cone-vector sandwich derived from sparse-vector bounds L‖v‖₂ ≤ ‖Av‖₁ ≤ U‖v‖₂."""

    model_config = ConfigDict(frozen=True)

    L: float = Field(gt=0.0)
    U: float = Field(gt=0.0)
    alpha: float = Field(gt=1.0)
    k: int = Field(ge=1)
    delta: float = Field(ge=0.0)
    lower_coefficient: float
    lower_slack: float
    upper_coefficient: float
    upper_slack: float

    @model_validator(mode="after")
    def check_order(self) -> "ShellingBounds":
        if self.L > self.U:
            raise ValueError(f"L ({self.L}) must not exceed U ({self.U})")
        return self

    def lower(self, norm2: float) -> float:
        return self.lower_coefficient * norm2 - self.lower_slack

    def upper(self, norm2: float) -> float:
        return self.upper_coefficient * norm2 + self.upper_slack


class ShellingVerification(BaseModel):
    model_config = ConfigDict(frozen=True)

    passed: bool
    worst_margin: float
    cone_vectors: int
    boundary_vectors: int
    measured_L: float
    measured_U: float
    bounds: ShellingBounds
    failures: List[int] = Field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


class DirectionGapRequest(BaseModel):
    X: List[List[float]]
    v: List[float]
    eta: Fraction


class ShellingBoundsRequest(BaseModel):
    L: float = Field(gt=0.0)
    U: float = Field(gt=0.0)
    alpha: float = Field(gt=1.0)
    k: int = Field(ge=1)
    delta: float = Field(default=0.0, ge=0.0)


class DKWResponse(BaseModel):
    m: int
    tau: float
    band: float
