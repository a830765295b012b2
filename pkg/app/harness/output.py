"""
CSV and JSON writers for sweep results. Floats are written with 17
significant digits so reruns can be compared byte for byte.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import List, Union

from app.harness.schemas import SweepResult
from app.harness.sweeps import median_errors

logger = logging.getLogger(__name__)

BASE_COLUMNS = ["method", "grid_value", "trial", "relative_l2_error", "objective", "iterations", "seed", "converged"]


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def metric_columns(result: SweepResult) -> List[str]:
    return sorted({key for row in result.rows for key in row.metrics})


def sweep_to_csv(result: SweepResult) -> str:
    metrics = metric_columns(result)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(BASE_COLUMNS + metrics)
    for row in result.rows:
        writer.writerow([
            row.method,
            format_float(row.grid_value),
            row.trial,
            format_float(row.relative_error),
            format_float(row.objective),
            row.iterations,
            row.seed,
            int(row.converged),
        ] + [format_float(row.metrics[key]) if key in row.metrics else "" for key in metrics])
    return buffer.getvalue()


def write_sweep_csv(result: SweepResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(sweep_to_csv(result), encoding="utf-8")
    logger.info(f"Wrote {len(result.rows)} rows to {path}")
    return path


def sweep_summary(result: SweepResult) -> dict:
    return {
        "experiment": result.spec.experiment.value,
        "base_seed": result.spec.base_seed,
        "trials_per_point": result.spec.trials_per_point,
        "grid": result.spec.grid,
        "breakdown": result.breakdown,
        "median_errors": {
            method: [[value, median] for value, median in median_errors(result, method)]
            for method in result.methods
        },
    }


def write_sweep_json(result: SweepResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(sweep_summary(result), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
