"""
Problem directories: X.csv, wstar.csv, y.csv, zeta.csv, d.csv and a
manifest.txt of key=value lines (m, n, k, eta, adversary, seed).
"""

import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np

from app.core.exceptions import ConfigError, InvariantViolationError
from app.numerics import read_matrix_csv, read_vector_csv, write_matrix_csv, write_vector_csv
from app.problems.schemas import Problem

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.txt"
FILES = {
    "X": "X.csv",
    "w_star": "wstar.csv",
    "y": "y.csv",
    "zeta": "zeta.csv",
    "d": "d.csv",
}


def write_manifest(path: Path, values: Dict[str, object]) -> None:
    lines = [f"{key}={value}" for key, value in values.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: Path) -> Dict[str, str]:
    values = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: malformed manifest line {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def save_problem(problem: Problem, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    write_matrix_csv(directory / FILES["X"], problem.X)
    for field in ("w_star", "y", "zeta", "d"):
        write_vector_csv(directory / FILES[field], getattr(problem, field))
    write_manifest(directory / MANIFEST_NAME, problem.manifest())

    logger.info(f"Saved problem ({problem.m}x{problem.n}, {problem.adversary_name}) to {directory}")
    return directory


def load_problem(directory: Union[str, Path]) -> Problem:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise ConfigError(f"{directory}: missing {MANIFEST_NAME}")
    manifest = read_manifest(manifest_path)

    X = read_matrix_csv(directory / FILES["X"])
    arrays = {field: read_vector_csv(directory / FILES[field]) for field in ("w_star", "y", "zeta", "d")}

    clean = X @ arrays["w_star"]
    scale = 1.0 + float(np.max(np.abs(arrays["y"])))
    if not np.allclose(arrays["y"] - arrays["zeta"] - arrays["d"], clean, rtol=0.0, atol=1e-9 * scale):
        raise InvariantViolationError(f"{directory}: y does not match X·w_star + zeta + d")

    return Problem(
        X=X,
        corrupted_indices=np.flatnonzero(arrays["zeta"]),
        seed=int(manifest.get("seed", 0)),
        adversary_name=manifest.get("adversary", "none"),
        eta=float(manifest.get("eta", 0.0)),
        k=int(manifest["k"]) if "k" in manifest else None,
        **arrays,
    )
