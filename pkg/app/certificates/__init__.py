"""
Certificates Module
===================

Empirical tail masses, direction gaps, robustness constants, the shelling
sandwich and DKW bands.
"""

from app.certificates.schemas import RobustnessReport, ShellingBounds, ShellingVerification
from app.certificates.service import (
    empirical_g_hat,
    empirical_b_hat,
    direction_gap,
    zero_vs_truth_losses,
    estimate_robust_constants,
    shelling_bounds,
    shelling_blocks,
    verify_shelling_numerically,
    dkw_floor,
    dkw_band,
    dkw_violation_rate,
)

__all__ = [
    "RobustnessReport",
    "ShellingBounds",
    "ShellingVerification",
    "empirical_g_hat",
    "empirical_b_hat",
    "direction_gap",
    "zero_vs_truth_losses",
    "estimate_robust_constants",
    "shelling_bounds",
    "shelling_blocks",
    "verify_shelling_numerically",
    "dkw_floor",
    "dkw_band",
    "dkw_violation_rate",
]
