"""
Analytics Module
================

Standard-normal tail quantities behind the breakdown points.
"""

from app.analytics.schemas import AnalyticsTable, Fraction, SQRT_2_OVER_PI
from app.analytics.service import (
    std_normal_pdf,
    std_normal_cdf,
    std_normal_quantile,
    inv_erf,
    tail_threshold,
    big_b,
    big_g,
    eta0,
    eta0_closed_form,
    mean_abs_moment,
    tail_moments_p,
    breakdown_threshold,
    breakdown_curve,
    analytics_table,
    sparse_lower_bound_margin,
    dense_lower_bound_constant,
    uniform_recovery_margin,
    sample_complexity_bound,
    expected_gap_per_sample,
)

__all__ = [
    "AnalyticsTable",
    "Fraction",
    "SQRT_2_OVER_PI",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_quantile",
    "inv_erf",
    "tail_threshold",
    "big_b",
    "big_g",
    "eta0",
    "eta0_closed_form",
    "mean_abs_moment",
    "tail_moments_p",
    "breakdown_threshold",
    "breakdown_curve",
    "analytics_table",
    "sparse_lower_bound_margin",
    "dense_lower_bound_constant",
    "uniform_recovery_margin",
    "sample_complexity_bound",
    "expected_gap_per_sample",
]
