"""
Problem Instance Schemas
"""
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.analytics.schemas import Fraction


class CorruptionKind(str, Enum):
    TOPK_ZEROING = "topk_zeroing"
    RANDOM_SIGN = "random_sign"
    DENSE_ADVERSARY = "dense_adversary"
    NONE = "none"


class CorruptionSpec(BaseModel):
    """Which adversary to apply and with what budget (⌊ηm⌋ entries)."""

    model_config = ConfigDict(frozen=True)

    eta: Fraction = 0.0
    kind: CorruptionKind = CorruptionKind.NONE
    magnitude: float = 1.0        # random_sign only
    epsilon: Fraction = 0.1       # dense_adversary only


class Problem(BaseModel):
    """
    One observation instance y = X·w_star + zeta + d.

    corrupted_indices is the support of zeta. Structural invariants are
    checked here; the exact reconstruction of y is checked by
    assemble_problem, which owns the arithmetic.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X: np.ndarray
    w_star: np.ndarray
    zeta: np.ndarray
    d: np.ndarray
    y: np.ndarray
    corrupted_indices: np.ndarray
    seed: int = 0
    adversary_name: str = CorruptionKind.NONE.value
    eta: float = Field(default=0.0, ge=0.0, le=1.0)
    k: Optional[int] = None

    @model_validator(mode="after")
    def check_shapes(self) -> "Problem":
        if self.X.ndim != 2:
            raise ValueError("X must be a matrix")
        m, n = self.X.shape
        if self.w_star.shape != (n,):
            raise ValueError(f"w_star must have length {n}")
        for name in ("zeta", "d", "y"):
            if getattr(self, name).shape != (m,):
                raise ValueError(f"{name} must have length {m}")
        support = np.flatnonzero(self.zeta)
        if not np.array_equal(np.sort(self.corrupted_indices), support):
            raise ValueError("corrupted_indices must equal the support of zeta")
        return self

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def manifest(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "k": self.k if self.k is not None else int(np.count_nonzero(self.w_star)),
            "eta": self.eta,
            "adversary": self.adversary_name,
            "seed": self.seed,
        }
