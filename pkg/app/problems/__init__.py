"""
Problems Module
===============

Instances of y = X·w∗ + ζ + d and the adversaries that build them.
"""

from app.problems.schemas import CorruptionKind, CorruptionSpec, Problem
from app.problems.service import (
    derive_seed,
    standard_normal,
    sample_gaussian_design,
    sample_sparse_signal,
    corruption_budget,
    corrupt_topk_zeroing,
    dense_adversary_support_size,
    adversarial_dense_noise,
    random_corruption,
    scaled_dense_noise,
    assemble_problem,
    generate_problem,
)
from app.problems.storage import save_problem, load_problem

__all__ = [
    "CorruptionKind",
    "CorruptionSpec",
    "Problem",
    "derive_seed",
    "standard_normal",
    "sample_gaussian_design",
    "sample_sparse_signal",
    "corruption_budget",
    "corrupt_topk_zeroing",
    "dense_adversary_support_size",
    "adversarial_dense_noise",
    "random_corruption",
    "scaled_dense_noise",
    "assemble_problem",
    "generate_problem",
    "save_problem",
    "load_problem",
]
