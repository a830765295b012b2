"""
Matrix/vector CSV files.

Format: optional header line ``# m,n``, then one row per line with
comma-separated decimal floats written with 17 significant digits so a
write/read cycle is bit-exact.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from app.core.exceptions import DimensionMismatchError, DomainError
from app.numerics.linalg import Matrix, Vector, as_matrix, as_vector

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

FLOAT_FORMAT = "%.17g"


def _read_header(path: Path):
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().strip()
    if not first.startswith("#"):
        return None
    try:
        m, n = (int(part) for part in first.lstrip("#").split(","))
    except ValueError:
        return None
    return m, n


def read_matrix_csv(path: PathLike) -> Matrix:
    path = Path(path)
    header = _read_header(path)
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise DomainError(f"{path}: not a numeric CSV matrix ({e})") from e

    if header is not None and data.shape != header:
        raise DimensionMismatchError(f"{path}: header says {header}, file holds {data.shape}")

    logger.debug(f"Read {data.shape[0]}x{data.shape[1]} matrix from {path}")
    return as_matrix(data, str(path))


def read_vector_csv(path: PathLike) -> Vector:
    """A vector file is an m×1 matrix file."""
    data = read_matrix_csv(path)
    if data.shape[1] != 1 and data.shape[0] != 1:
        raise DimensionMismatchError(f"{Path(path)}: expected a single column, got shape {data.shape}")
    return as_vector(data.ravel(), str(path))


def write_matrix_csv(path: PathLike, A: ArrayLike, header: bool = True) -> Path:
    path = Path(path)
    A = as_matrix(A, str(path))
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        path,
        A,
        delimiter=",",
        fmt=FLOAT_FORMAT,
        header=f"{A.shape[0]},{A.shape[1]}" if header else "",
        comments="# ",
    )
    return path


def write_vector_csv(path: PathLike, v: ArrayLike, header: bool = True) -> Path:
    v = as_vector(v, str(path))
    return write_matrix_csv(path, v.reshape(-1, 1), header=header)
