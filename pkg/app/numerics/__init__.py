"""
Numerics Module
===============

Dense storage, products, SPD factorization and partial sums.
"""

from app.numerics.linalg import (
    Matrix,
    Vector,
    SPDFactor,
    as_matrix,
    as_vector,
    matvec,
    l1_norm,
    spd_factor,
    sorted_abs_order,
    top_abs_partial_sums,
)
from app.numerics.io import (
    read_matrix_csv,
    read_vector_csv,
    write_matrix_csv,
    write_vector_csv,
)

__all__ = [
    "Matrix",
    "Vector",
    "SPDFactor",
    "as_matrix",
    "as_vector",
    "matvec",
    "l1_norm",
    "spd_factor",
    "sorted_abs_order",
    "top_abs_partial_sums",
    "read_matrix_csv",
    "read_vector_csv",
    "write_matrix_csv",
    "write_vector_csv",
]
