"""
Harness Module
==============

Sweep configuration, experiment sweeps and their CSV/JSON output.
"""

from app.harness.schemas import Experiment, LambdaPolicy, SweepSpec, SweepRow, SweepResult
from app.harness.config import load_sweep_config, parse_config_text, parse_grid, spec_from_values
from app.harness.sweeps import (
    job_seed,
    build_jobs,
    run_sweep,
    run_breakdown_sweep,
    run_sample_complexity_sweep,
    run_dense_noise_scaling,
    run_lower_bound_dense,
    run_p_threshold_curve,
    median_errors,
    success_fractions,
    estimate_breakdown,
    minimal_recovery_m,
)
from app.harness.output import sweep_to_csv, sweep_summary, write_sweep_csv, write_sweep_json

__all__ = [
    "Experiment",
    "LambdaPolicy",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "load_sweep_config",
    "parse_config_text",
    "parse_grid",
    "spec_from_values",
    "job_seed",
    "build_jobs",
    "run_sweep",
    "run_breakdown_sweep",
    "run_sample_complexity_sweep",
    "run_dense_noise_scaling",
    "run_lower_bound_dense",
    "run_p_threshold_curve",
    "median_errors",
    "success_fractions",
    "estimate_breakdown",
    "minimal_recovery_m",
    "sweep_to_csv",
    "sweep_summary",
    "write_sweep_csv",
    "write_sweep_json",
]
