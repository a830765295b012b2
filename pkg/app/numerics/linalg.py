"""
Dense Linear Algebra Helpers
============================

Row-major float64 numpy storage for design matrices and vectors, the
products the solvers need, a cached Cholesky factor for the
normal-equations systems, and sorted absolute-value partial sums.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg as sla

from app.core.exceptions import (
    DimensionMismatchError,
    DomainError,
    NotPositiveDefiniteError,
)

logger = logging.getLogger(__name__)

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]

# Pivots below this (relative to the largest pivot) count as nonpositive.
_PIVOT_RTOL = 1e-14


def as_matrix(data: ArrayLike, name: str = "matrix") -> Matrix:
    """Validate and convert to a C-contiguous finite float64 matrix."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatchError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def as_vector(data: ArrayLike, name: str = "vector") -> Vector:
    """Validate and convert to a finite 1-D float64 vector."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def matvec(A: ArrayLike, v: ArrayLike) -> Vector:
    """Matrix-vector product with a shape check."""
    A = as_matrix(A, "A")
    v = as_vector(v, "v")
    if A.shape[1] != v.shape[0]:
        raise DimensionMismatchError(
            f"cannot multiply {A.shape[0]}x{A.shape[1]} matrix by vector of length {v.shape[0]}"
        )
    return A @ v


def l1_norm(v: ArrayLike) -> float:
    # np.sum uses pairwise summation
    return float(np.sum(np.abs(v)))


@dataclass(frozen=True)
class SPDFactor:
    """Immutable Cholesky factor of a symmetric positive-definite matrix."""

    factor: Matrix
    lower: bool
    size: int

    def solve(self, b: ArrayLike) -> Vector:
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.size:
            raise DimensionMismatchError(
                f"right-hand side has length {b.shape[0]}, factor has size {self.size}"
            )
        return sla.cho_solve((self.factor, self.lower), b, check_finite=False)


def spd_factor(A: ArrayLike) -> SPDFactor:
    """
    Cholesky-factor a symmetric positive-definite matrix.

    Raises DimensionMismatchError for non-square input and
    NotPositiveDefiniteError for asymmetric input or a nonpositive pivot.
    """
    A = as_matrix(A, "A")
    n, n2 = A.shape
    if n != n2:
        raise DimensionMismatchError(f"SPD factorization needs a square matrix, got {n}x{n2}")

    scale = max(float(np.max(np.abs(A))), 1.0)
    if not np.allclose(A, A.T, rtol=1e-10, atol=1e-12 * scale):
        raise NotPositiveDefiniteError("matrix is not symmetric")

    try:
        factor, lower = sla.cho_factor(A, lower=False, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"nonpositive pivot: {e}") from e

    pivots = np.abs(np.diag(factor))
    if pivots.min() ** 2 <= _PIVOT_RTOL * pivots.max() ** 2:
        raise NotPositiveDefiniteError(
            f"numerically nonpositive pivot (min {pivots.min():.3e}, max {pivots.max():.3e})"
        )

    return SPDFactor(factor=factor, lower=lower, size=n)


def sorted_abs_order(v: ArrayLike, descending: bool = True) -> NDArray[np.intp]:
    """Indices ordering |v|; equal magnitudes keep the lower index first."""
    a = np.abs(np.asarray(v, dtype=np.float64))
    key = -a if descending else a
    return np.argsort(key, kind="stable")


def top_abs_partial_sums(v: ArrayLike, count: int) -> Tuple[float, float]:
    """
    Split ‖v‖₁ into the sum of the `count` largest |vᵢ| and the rest.

    Ties are broken by lower index first.
    """
    v = as_vector(v, "v")
    if count < 0 or count > v.shape[0]:
        raise DomainError(f"count must lie in [0, {v.shape[0]}], got {count}")

    order = sorted_abs_order(v, descending=True)
    a = np.abs(v)
    top_sum = float(np.sum(a[order[:count]]))
    rest_sum = float(np.sum(a[order[count:]]))
    return top_sum, rest_sum
