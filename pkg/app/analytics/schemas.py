"""
Analytics Pydantic Schemas
"""
import math
from typing import Annotated, List

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Dimensionless fraction of samples (η, γ, ε).
Fraction = Annotated[float, Field(ge=0.0, le=1.0)]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# Tolerance for the p=1 partition identity on stored tables.
_TABLE_IDENTITY_TOL = 1e-8


class AnalyticsTable(BaseModel):
    """B/G (or their p-th moment analogues) evaluated on a γ grid."""

    model_config = ConfigDict(frozen=True)

    grid: List[Fraction]
    p: float = Field(gt=0.0, le=1.0)
    g_values: List[float]
    b_values: List[float]

    @model_validator(mode="after")
    def check_table(self) -> "AnalyticsTable":
        n = len(self.grid)
        if n == 0:
            raise ValueError("grid must be non-empty")
        if len(self.g_values) != n or len(self.b_values) != n:
            raise ValueError("g_values and b_values must match the grid length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        if self.p == 1.0:
            for gamma, g, b in zip(self.grid, self.g_values, self.b_values):
                if abs(g + b - SQRT_2_OVER_PI) > _TABLE_IDENTITY_TOL:
                    raise ValueError(f"G+B != sqrt(2/pi) at gamma={gamma}")
        return self

    def rows(self):
        for gamma, g, b in zip(self.grid, self.g_values, self.b_values):
            yield gamma, self.p, g, b

    def to_csv(self) -> str:
        lines = ["gamma,p,g,b"]
        for gamma, p, g, b in self.rows():
            lines.append(f"{gamma:.17g},{p:.17g},{g:.17g},{b:.17g}")
        return "\n".join(lines) + "\n"


class BreakdownPoint(BaseModel):
    p: float
    threshold: float


class Eta0Response(BaseModel):
    eta0: float
    closed_form: float
    g_minus_b: float
