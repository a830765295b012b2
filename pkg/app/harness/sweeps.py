"""
Experiment Sweeps
=================

Every (grid point, trial) pair is an independent job with its own seed,
hashed from (base_seed, experiment, grid index, trial). Jobs run in-process
or on a process pool; rows are sorted by (method, grid_value, trial) once
all jobs are back, so output does not depend on the worker count.

Experiments:
- breakdown_1d         1-D top-zeroing corruption swept over η
- sample_complexity    sparse recovery swept over m (constrained L1)
- dense_noise_scaling  fixed instance, dense noise of growing ‖d‖₁
- lower_bound_dense    the dense adversary swept over ε
- p_threshold_curve    analytic ℓp breakdown per p, optionally measured
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from app.analytics import breakdown_threshold
from app.core.config import get_settings
from app.core.exceptions import RobustRegressionError
from app.core.sentry import set_sweep_context
from app.harness.schemas import Experiment, SweepResult, SweepRow, SweepSpec
from app.problems import (
    CorruptionKind,
    CorruptionSpec,
    Problem,
    assemble_problem,
    derive_seed,
    generate_problem,
    sample_gaussian_design,
    sample_sparse_signal,
    scaled_dense_noise,
)
from app.solvers import SolverOptions, SolverResult, check_method, relative_error, solve

logger = logging.getLogger(__name__)

# torrent trims a fraction strictly below one half.
TORRENT_MAX_ETA = 0.49
BREAKDOWN_THRESHOLD = 1e-3
MIN_RECOVERY_M = 64
MAX_RECOVERY_M = 1024


def job_seed(base_seed: int, experiment: str, grid_index: int, trial: int) -> int:
    return derive_seed(base_seed, experiment, grid_index, trial)


@dataclass(frozen=True)
class Job:
    spec: SweepSpec
    grid_index: int
    grid_value: float
    trial: int
    seed: int


# ==================== Solving One Instance ====================

def _method_params(method: str, spec: SweepSpec, problem: Problem, eta: float) -> Dict[str, float]:
    if method == "l1_constrained":
        return {"lam": spec.lambda_for(float(np.sum(np.abs(problem.w_star))))}
    if method == "lp":
        return {"p": spec.p}
    if method == "torrent":
        return {"eta": min(eta, TORRENT_MAX_ETA)}
    if method == "filter":
        return {"eta": eta}
    return {}


def _solve_row(
    method: str,
    problem: Problem,
    job: Job,
    eta: float,
    opts: SolverOptions,
    extra: Optional[Callable[[SolverResult], Dict[str, float]]] = None,
) -> SweepRow:
    params = _method_params(method, job.spec, problem, eta)
    try:
        result = solve(method, problem.X, problem.y, opts=opts, **params)
    except RobustRegressionError as e:
        logger.warning(f"{method} failed at grid value {job.grid_value} trial {job.trial}: {e}")
        return SweepRow(
            method=method,
            grid_value=job.grid_value,
            trial=job.trial,
            relative_error=math.nan,
            objective=math.nan,
            iterations=0,
            seed=job.seed,
            converged=False,
            metrics={"failed": 1.0},
        )

    metrics = {}
    if result.survivors is not None:
        metrics["survivors"] = float(result.survivors)
    if extra is not None:
        metrics.update(extra(result))
    return SweepRow(
        method=method,
        grid_value=job.grid_value,
        trial=job.trial,
        relative_error=relative_error(result.estimate, problem.w_star),
        objective=result.objective,
        iterations=result.iterations,
        seed=job.seed,
        converged=result.converged,
        metrics=metrics,
    )


def _options(job: Job) -> SolverOptions:
    return SolverOptions.from_settings(seed=derive_seed(job.seed, "solver"))


# ==================== Experiment Jobs ====================

def _breakdown_job(job: Job) -> List[SweepRow]:
    spec = job.spec
    eta = job.grid_value
    problem = generate_problem(
        spec.m, spec.n, min(spec.k, spec.n), spec.amplitude,
        CorruptionSpec(eta=eta, kind=CorruptionKind.TOPK_ZEROING), job.seed,
    )
    opts = _options(job)
    return [_solve_row(method, problem, job, eta, opts) for method in spec.methods]


def _sample_complexity_job(job: Job) -> List[SweepRow]:
    spec = job.spec
    m = int(round(job.grid_value))
    problem = generate_problem(
        m, spec.n, spec.k, spec.amplitude,
        CorruptionSpec(eta=spec.eta, kind=CorruptionKind.TOPK_ZEROING), job.seed,
    )
    opts = _options(job)
    return [_solve_row(method, problem, job, spec.eta, opts) for method in spec.methods]


def _dense_noise_job(job: Job) -> List[SweepRow]:
    """The design, signal and noise direction depend on the trial only."""
    spec = job.spec
    instance_seed = job_seed(spec.base_seed, spec.experiment.value, 0, job.trial)
    X = sample_gaussian_design(spec.m, spec.n, derive_seed(instance_seed, "design"))
    w_star = sample_sparse_signal(spec.n, min(spec.k, spec.n), spec.amplitude, derive_seed(instance_seed, "signal"))
    d = scaled_dense_noise(spec.m, job.grid_value, derive_seed(instance_seed, "noise"))
    problem = assemble_problem(
        X, w_star, CorruptionSpec(eta=spec.eta, kind=CorruptionKind.TOPK_ZEROING),
        dense_noise=d, seed=instance_seed, k=spec.k,
    )
    opts = _options(job)
    return [
        _solve_row(method, problem, job, spec.eta, opts, lambda result: {"noise_l1": job.grid_value})
        for method in spec.methods
    ]


def _lower_bound_dense_job(job: Job) -> List[SweepRow]:
    spec = job.spec
    epsilon = job.grid_value
    problem = generate_problem(
        spec.m, spec.n, min(spec.k, spec.n), spec.amplitude,
        CorruptionSpec(eta=0.0, kind=CorruptionKind.DENSE_ADVERSARY, epsilon=epsilon), job.seed,
    )
    opts = _options(job)
    d_l1 = float(np.sum(np.abs(problem.d)))

    def lower_bound_metrics(result: SolverResult) -> Dict[str, float]:
        error = float(np.linalg.norm(result.estimate - problem.w_star))
        return {
            "estimate_norm": float(np.linalg.norm(result.estimate)),
            "noise_l1": d_l1,
            "noise_ratio": error * problem.m / d_l1 if d_l1 > 0.0 else math.inf,
        }

    return [_solve_row(method, problem, job, 0.0, opts, lower_bound_metrics) for method in spec.methods]


def _p_curve_job(job: Job) -> List[SweepRow]:
    """Analytic breakdown at trial 0; empirical breakdown per trial for 'lp'."""
    spec = job.spec
    p = job.grid_value
    rows = []
    if job.trial == 0:
        rows.append(SweepRow(
            method="analytic",
            grid_value=p,
            trial=0,
            relative_error=math.nan,
            objective=0.0,
            iterations=0,
            seed=job.seed,
            metrics={"breakdown": breakdown_threshold(min(p, 1.0))},
        ))

    if spec.eta_grid and any(method in ("lp", "l1") for method in spec.methods):
        method = "l1" if p >= 1.0 else "lp"
        opts = _options(job)
        measured = None
        iterations = 0
        metrics = {}
        for index, eta in enumerate(spec.eta_grid):
            problem = generate_problem(
                spec.m, 1, 1, spec.amplitude,
                CorruptionSpec(eta=eta, kind=CorruptionKind.TOPK_ZEROING), derive_seed(job.seed, "eta", index),
            )
            params = {"p": p} if method == "lp" else {}
            try:
                result = solve(method, problem.X, problem.y, opts=opts, **params)
            except RobustRegressionError as e:
                logger.warning(f"{method} failed at p={p} eta={eta} trial {job.trial}: {e}")
                metrics["failed"] = 1.0
                measured = eta
                break
            iterations += result.iterations
            if relative_error(result.estimate, problem.w_star) > BREAKDOWN_THRESHOLD:
                measured = eta
                break
        rows.append(SweepRow(
            method="empirical",
            grid_value=p,
            trial=job.trial,
            relative_error=math.nan,
            objective=0.0,
            iterations=iterations,
            seed=job.seed,
            metrics={"breakdown": measured if measured is not None else math.inf, **metrics},
        ))
    return rows


JOB_RUNNERS: Dict[Experiment, Callable[[Job], List[SweepRow]]] = {
    Experiment.BREAKDOWN_1D: _breakdown_job,
    Experiment.SAMPLE_COMPLEXITY: _sample_complexity_job,
    Experiment.DENSE_NOISE_SCALING: _dense_noise_job,
    Experiment.LOWER_BOUND_DENSE: _lower_bound_dense_job,
    Experiment.P_THRESHOLD_CURVE: _p_curve_job,
}


def _run_job(job: Job) -> List[SweepRow]:
    return JOB_RUNNERS[job.spec.experiment](job)


# ==================== Execution ====================

def build_jobs(spec: SweepSpec) -> List[Job]:
    return [
        Job(spec, index, value, trial, job_seed(spec.base_seed, spec.experiment.value, index, trial))
        for index, value in enumerate(spec.grid)
        for trial in range(spec.trials_per_point)
    ]


def _check_methods(spec: SweepSpec) -> None:
    if spec.experiment == Experiment.P_THRESHOLD_CURVE:
        return
    for method in spec.methods:
        check_method(method)
    if spec.experiment == Experiment.BREAKDOWN_1D and "filter" in spec.methods and spec.n != 1:
        raise RobustRegressionError("the filter baseline needs n = 1")


def run_sweep(spec: SweepSpec, workers: Optional[int] = None, progress: Optional[bool] = None) -> SweepResult:
    """Run every job of the sweep and return rows in deterministic order."""
    _check_methods(spec)
    settings = get_settings()
    workers = workers or spec.workers or settings.sweep_workers
    progress = settings.show_progress if progress is None else progress

    jobs = build_jobs(spec)
    set_sweep_context(spec.experiment.value, spec.base_seed, len(jobs))
    logger.info(f"Running {spec.experiment.value}: {len(jobs)} jobs on {workers} worker(s)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(tqdm(pool.map(_run_job, jobs), total=len(jobs), disable=not progress))
    else:
        batches = [_run_job(job) for job in tqdm(jobs, disable=not progress)]

    rows = sorted((row for batch in batches for row in batch), key=SweepRow.sort_key)
    result = SweepResult(spec=spec, rows=rows)

    if spec.experiment == Experiment.BREAKDOWN_1D:
        breakdown = {method: estimate_breakdown(result, method) for method in spec.methods}
        logger.info(f"Estimated breakdown points: {breakdown}")
        result = result.model_copy(update={"breakdown": breakdown})
    return result


def run_breakdown_sweep(spec: SweepSpec, **kwargs) -> SweepResult:
    _expect(spec, Experiment.BREAKDOWN_1D)
    if spec.n != 1:
        raise RobustRegressionError(f"breakdown_1d needs n = 1, got n={spec.n}")
    return run_sweep(spec, **kwargs)


def run_sample_complexity_sweep(spec: SweepSpec, **kwargs) -> SweepResult:
    _expect(spec, Experiment.SAMPLE_COMPLEXITY)
    return run_sweep(spec, **kwargs)


def run_dense_noise_scaling(spec: SweepSpec, **kwargs) -> SweepResult:
    _expect(spec, Experiment.DENSE_NOISE_SCALING)
    return run_sweep(spec, **kwargs)


def run_lower_bound_dense(spec: SweepSpec, **kwargs) -> SweepResult:
    _expect(spec, Experiment.LOWER_BOUND_DENSE)
    return run_sweep(spec, **kwargs)


def run_p_threshold_curve(spec: SweepSpec, **kwargs) -> SweepResult:
    _expect(spec, Experiment.P_THRESHOLD_CURVE)
    return run_sweep(spec, **kwargs)


def _expect(spec: SweepSpec, experiment: Experiment) -> None:
    if spec.experiment != experiment:
        raise RobustRegressionError(f"expected a {experiment.value} spec, got {spec.experiment.value}")


# ==================== Summaries ====================

def median_errors(result: SweepResult, method: str) -> List[Tuple[float, float]]:
    """(grid_value, median relative error) in grid order."""
    grouped: Dict[float, List[float]] = {}
    for row in result.rows_for(method):
        grouped.setdefault(row.grid_value, []).append(row.relative_error)
    return [(value, float(np.median(errors))) for value, errors in sorted(grouped.items())]


def success_fractions(
    result: SweepResult,
    method: str,
    threshold: float = BREAKDOWN_THRESHOLD,
) -> List[Tuple[float, float]]:
    grouped: Dict[float, List[bool]] = {}
    for row in result.rows_for(method):
        grouped.setdefault(row.grid_value, []).append(row.relative_error <= threshold)
    return [(value, sum(flags) / len(flags)) for value, flags in sorted(grouped.items())]


def estimate_breakdown(
    result: SweepResult,
    method: str,
    threshold: float = BREAKDOWN_THRESHOLD,
) -> Optional[float]:
    """Smallest grid value whose median relative error exceeds the threshold."""
    for value, median in median_errors(result, method):
        if not median <= threshold:
            return value
    return None


def minimal_recovery_m(
    n: int,
    k: int,
    eta: float,
    seed: int,
    amplitude: float = 1.0,
    method: str = "l1_constrained",
    start: int = MIN_RECOVERY_M,
    limit: int = MAX_RECOVERY_M,
    threshold: float = BREAKDOWN_THRESHOLD,
) -> Optional[int]:
    """Double m from `start` until exact recovery; None if `limit` is passed first."""
    check_method(method)
    m = start
    while m <= limit:
        problem = generate_problem(
            m, n, k, amplitude,
            CorruptionSpec(eta=eta, kind=CorruptionKind.TOPK_ZEROING), derive_seed(seed, "m", m),
        )
        params = {"lam": float(np.sum(np.abs(problem.w_star)))} if method == "l1_constrained" else {}
        result = solve(method, problem.X, problem.y, **params)
        error = relative_error(result.estimate, problem.w_star)
        logger.debug(f"minimal_recovery_m: m={m} error={error:.3e}")
        if error <= threshold:
            return m
        m *= 2
    return None
