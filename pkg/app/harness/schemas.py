"""
Harness Pydantic Schemas
"""
import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import get_settings


class Experiment(str, Enum):
    BREAKDOWN_1D = "breakdown_1d"
    SAMPLE_COMPLEXITY = "sample_complexity"
    DENSE_NOISE_SCALING = "dense_noise_scaling"
    P_THRESHOLD_CURVE = "p_threshold_curve"
    LOWER_BOUND_DENSE = "lower_bound_dense"


class LambdaPolicy(str, Enum):
    EXACT = "exact"          # λ = ‖w∗‖₁
    MULTIPLE = "multiple"    # λ = lambda_multiple·‖w∗‖₁


# Which grid each experiment sweeps over.
PRIMARY_GRID = {
    Experiment.BREAKDOWN_1D: "eta_grid",
    Experiment.SAMPLE_COMPLEXITY: "m_grid",
    Experiment.DENSE_NOISE_SCALING: "noise_grid",
    Experiment.P_THRESHOLD_CURVE: "p_grid",
    Experiment.LOWER_BOUND_DENSE: "epsilon_grid",
}


def _default_trials() -> int:
    return get_settings().default_trials


class SweepSpec(BaseModel):
    """One experiment: fixed problem parameters plus the grid swept over."""

    model_config = ConfigDict(frozen=True)

    experiment: Experiment
    methods: List[str] = Field(default_factory=lambda: ["l1"])

    eta_grid: Optional[List[float]] = None
    p_grid: Optional[List[float]] = None
    m_grid: Optional[List[float]] = None
    noise_grid: Optional[List[float]] = None
    epsilon_grid: Optional[List[float]] = None

    m: int = Field(default=1000, ge=1)
    n: int = Field(default=1, ge=1)
    k: int = Field(default=1, ge=1)
    amplitude: float = Field(default=100.0, gt=0.0)
    eta: float = Field(default=0.15, ge=0.0, le=1.0)
    epsilon: float = Field(default=0.1, gt=0.0, lt=0.2)
    p: float = Field(default=0.5, gt=0.0, lt=1.0)
    lambda_policy: LambdaPolicy = LambdaPolicy.EXACT
    lambda_multiple: float = Field(default=1.0, gt=0.0)
    trials_per_point: int = Field(default_factory=_default_trials, ge=1)
    base_seed: int = Field(default=0, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_grids(self) -> "SweepSpec":
        primary = PRIMARY_GRID[self.experiment]
        if getattr(self, primary) is None:
            raise ValueError(f"experiment {self.experiment.value} needs {primary}")
        for name in PRIMARY_GRID.values():
            grid = getattr(self, name)
            if grid is None:
                continue
            if not grid:
                raise ValueError(f"{name} must not be empty")
            if not all(math.isfinite(v) for v in grid):
                raise ValueError(f"{name} contains non-finite values")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if not self.methods:
            raise ValueError("methods must not be empty")
        return self

    @property
    def grid(self) -> List[float]:
        return getattr(self, PRIMARY_GRID[self.experiment])

    def lambda_for(self, w_star_l1: float) -> float:
        if self.lambda_policy == LambdaPolicy.EXACT:
            return w_star_l1
        return self.lambda_multiple * w_star_l1


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: str
    grid_value: float
    trial: int
    relative_error: float
    objective: float
    iterations: int
    seed: int
    converged: bool = True
    metrics: Dict[str, float] = Field(default_factory=dict)

    def sort_key(self):
        return (self.method, self.grid_value, self.trial)


class SweepResult(BaseModel):
    """Rows ordered by (method, grid_value, trial), plus breakdown estimates."""

    spec: SweepSpec
    rows: List[SweepRow]
    breakdown: Dict[str, Optional[float]] = Field(default_factory=dict)

    def rows_for(self, method: str) -> List[SweepRow]:
        return [row for row in self.rows if row.method == method]

    @property
    def methods(self) -> List[str]:
        return sorted({row.method for row in self.rows})
