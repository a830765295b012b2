"""
Experiment harness tests
Run with: pytest tests/test_harness.py -v
Acceptance sweeps are marked slow: pytest -m slow
"""
import json
import math

import numpy as np
import pytest

from app.analytics import big_g, eta0
from app.core.exceptions import ConfigError, RobustRegressionError, SingularSystemError, UnknownMethodError
from app.harness import (
    Experiment,
    SweepResult,
    SweepRow,
    SweepSpec,
    build_jobs,
    estimate_breakdown,
    job_seed,
    load_sweep_config,
    median_errors,
    minimal_recovery_m,
    parse_config_text,
    parse_grid,
    run_breakdown_sweep,
    run_dense_noise_scaling,
    run_lower_bound_dense,
    run_p_threshold_curve,
    run_sample_complexity_sweep,
    run_sweep,
    spec_from_values,
    success_fractions,
    sweep_summary,
    sweep_to_csv,
    write_sweep_csv,
    write_sweep_json,
)
from app.problems import CorruptionKind, CorruptionSpec, derive_seed, generate_problem
from app.solvers import SolverOptions, l1_regress, relative_error, solve

BREAKDOWN_CONFIG = """
# small breakdown sweep
experiment = breakdown_1d
methods = l1, least_squares
eta_grid = 0, 0.1, 0.35
m = 200
amplitude = 100
trials = 2
seed = 3
"""


def _row(method, value, trial, error):
    return SweepRow(method=method, grid_value=value, trial=trial, relative_error=error,
                    objective=0.0, iterations=1, seed=0)


class TestConfig:
    def test_range_grid(self):
        grid = parse_grid("0:0.5:0.02")
        assert len(grid) == 26
        assert grid[0] == 0.0 and grid[1] == 0.02 and grid[-1] == 0.5
        assert grid[12] == 0.24

    def test_list_grid(self):
        assert parse_grid("10, 20,40") == [10.0, 20.0, 40.0]

    @pytest.mark.parametrize("text", ["0:1", "1:0:0.1", "0:1:0"])
    def test_bad_range(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)

    def test_parse_text(self):
        values = parse_config_text(BREAKDOWN_CONFIG)
        assert values == {
            "experiment": "breakdown_1d",
            "methods": ["l1", "least_squares"],
            "eta_grid": [0.0, 0.1, 0.35],
            "m": 200,
            "amplitude": 100.0,
            "trials_per_point": 2,
            "base_seed": 3,
        }

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("experiment = breakdown_1d\ncolour = blue\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="bad value for m"):
            parse_config_text("m = lots\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match=":2:"):
            parse_config_text("m = 10\njust words\n")

    def test_spec_validation(self):
        with pytest.raises(ConfigError, match="eta_grid"):
            spec_from_values({"experiment": "breakdown_1d"})
        with pytest.raises(ConfigError):
            spec_from_values({"experiment": "breakdown_1d", "eta_grid": [0.2, 0.1]})
        with pytest.raises(ConfigError):
            spec_from_values({"experiment": "nonsense", "eta_grid": [0.1]})

    def test_load_file(self, tmp_path):
        path = tmp_path / "sweep.cfg"
        path.write_text(BREAKDOWN_CONFIG)
        spec = load_sweep_config(path)
        assert spec.experiment == Experiment.BREAKDOWN_1D
        assert spec.grid == [0.0, 0.1, 0.35]
        assert spec.n == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_sweep_config(tmp_path / "missing.cfg")


class TestSeedsAndJobs:
    def test_job_seed_is_stable(self):
        assert job_seed(0, "breakdown_1d", 3, 1) == job_seed(0, "breakdown_1d", 3, 1)
        seeds = {job_seed(0, "breakdown_1d", i, t) for i in range(10) for t in range(5)}
        assert len(seeds) == 50
        assert job_seed(1, "breakdown_1d", 0, 0) != job_seed(0, "breakdown_1d", 0, 0)

    def test_build_jobs(self):
        spec = SweepSpec(experiment="breakdown_1d", eta_grid=[0.0, 0.1], trials_per_point=3)
        jobs = build_jobs(spec)
        assert len(jobs) == 6
        assert [(job.grid_index, job.trial) for job in jobs[:3]] == [(0, 0), (0, 1), (0, 2)]
        assert jobs[4].grid_value == 0.1

    def test_lambda_policy(self):
        spec = SweepSpec(experiment="sample_complexity", m_grid=[64], lambda_policy="multiple", lambda_multiple=1.5)
        assert spec.lambda_for(2.0) == 3.0
        assert SweepSpec(experiment="sample_complexity", m_grid=[64]).lambda_for(2.0) == 2.0


class TestBreakdownSweep:
    @pytest.fixture(scope="class")
    def result(self):
        return run_sweep(spec_from_values(parse_config_text(BREAKDOWN_CONFIG)), workers=1)

    def test_rows_sorted(self, result):
        keys = [row.sort_key() for row in result.rows]
        assert keys == sorted(keys)
        assert len(result.rows) == 2 * 3 * 2
        assert result.methods == ["l1", "least_squares"]

    def test_clean_point_exact(self, result):
        for row in result.rows:
            if row.grid_value == 0.0:
                assert row.relative_error <= 1e-6

    def test_breakdown_estimates(self, result):
        assert result.breakdown == {"l1": 0.35, "least_squares": 0.1}
        assert estimate_breakdown(result, "l1") == 0.35

    def test_rows_replay_from_their_seed(self, result):
        for row in result.rows:
            problem = generate_problem(
                200, 1, 1, 100.0, CorruptionSpec(eta=row.grid_value, kind=CorruptionKind.TOPK_ZEROING), row.seed,
            )
            opts = SolverOptions.from_settings(seed=derive_seed(row.seed, "solver"))
            replay = solve(row.method, problem.X, problem.y, opts=opts)
            assert relative_error(replay.estimate, problem.w_star) == row.relative_error
            assert replay.iterations == row.iterations

    def test_median_error_nondecreasing_in_eta(self, result):
        medians = [median for _, median in median_errors(result, "l1")]
        assert len(medians) == 3
        assert all(later >= earlier - 1e-9 for earlier, later in zip(medians, medians[1:]))
        assert medians[-1] >= 0.5

    def test_csv_independent_of_workers(self, result):
        spec = spec_from_values(parse_config_text(BREAKDOWN_CONFIG))
        assert sweep_to_csv(run_sweep(spec, workers=2)) == sweep_to_csv(result)

    def test_csv_layout(self, result, tmp_path):
        path = write_sweep_csv(result, tmp_path / "out" / "sweep.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "method,grid_value,trial,relative_l2_error,objective,iterations,seed,converged"
        assert len(lines) == 1 + len(result.rows)
        assert lines[1].startswith("l1,0,0,")

    def test_json_summary(self, result, tmp_path):
        path = write_sweep_json(result, tmp_path / "summary.json")
        summary = json.loads(path.read_text())
        assert summary == json.loads(json.dumps(sweep_summary(result)))
        assert summary["breakdown"]["l1"] == 0.35
        assert [value for value, _ in summary["median_errors"]["l1"]] == [0.0, 0.1, 0.35]

    def test_wrapper_checks_experiment(self, result):
        assert run_breakdown_sweep(result.spec).breakdown == result.breakdown
        with pytest.raises(RobustRegressionError):
            run_sample_complexity_sweep(result.spec)

    def test_unknown_method(self):
        spec = SweepSpec(experiment="breakdown_1d", eta_grid=[0.1], methods=["ransac"], trials_per_point=1)
        with pytest.raises(UnknownMethodError):
            run_sweep(spec)

    def test_filter_needs_one_dimension(self):
        spec = SweepSpec(experiment="breakdown_1d", eta_grid=[0.1], methods=["filter"], n=2, k=1, trials_per_point=1)
        with pytest.raises(RobustRegressionError):
            run_sweep(spec)


class TestSummaries:
    def test_median_and_breakdown(self):
        spec = SweepSpec(experiment="breakdown_1d", eta_grid=[0.1, 0.2, 0.3], trials_per_point=3)
        rows = [
            _row("l1", 0.1, 0, 0.0), _row("l1", 0.1, 1, 0.0), _row("l1", 0.1, 2, 1.0),
            _row("l1", 0.2, 0, 0.5), _row("l1", 0.2, 1, 0.0), _row("l1", 0.2, 2, 0.9),
            _row("l1", 0.3, 0, 1.0), _row("l1", 0.3, 1, 1.0), _row("l1", 0.3, 2, 1.0),
        ]
        result = SweepResult(spec=spec, rows=rows)
        assert median_errors(result, "l1") == [(0.1, 0.0), (0.2, 0.5), (0.3, 1.0)]
        assert estimate_breakdown(result, "l1") == 0.2
        fractions = success_fractions(result, "l1")
        assert fractions[0] == (0.1, pytest.approx(2 / 3))
        assert fractions[2] == (0.3, 0.0)

    def test_no_breakdown(self):
        spec = SweepSpec(experiment="breakdown_1d", eta_grid=[0.1], trials_per_point=1)
        result = SweepResult(spec=spec, rows=[_row("l1", 0.1, 0, 0.0)])
        assert estimate_breakdown(result, "l1") is None

    def test_failed_rows_count_as_breakdown(self):
        spec = SweepSpec(experiment="breakdown_1d", eta_grid=[0.1], trials_per_point=1)
        result = SweepResult(spec=spec, rows=[_row("l1", 0.1, 0, math.nan)])
        assert estimate_breakdown(result, "l1") == 0.1


class TestOtherExperiments:
    def test_failed_solve_becomes_nan_row(self):
        spec = SweepSpec(experiment="sample_complexity", m_grid=[20], n=2, k=1, methods=["filter"],
                         trials_per_point=1, amplitude=1.0)
        result = run_sweep(spec)
        (row,) = result.rows
        assert math.isnan(row.relative_error)
        assert row.metrics == {"failed": 1.0}
        assert not row.converged

    def test_sample_complexity(self):
        spec = SweepSpec(experiment="sample_complexity", m_grid=[2, 400], n=20, k=4, eta=0.1,
                         methods=["l1_constrained"], amplitude=1.0, trials_per_point=2)
        result = run_sample_complexity_sweep(spec)
        fractions = dict(success_fractions(result, "l1_constrained"))
        assert fractions[2.0] == 0.0
        assert fractions[400.0] == 1.0

    def test_dense_noise_zero_is_exact(self):
        spec = SweepSpec(experiment="dense_noise_scaling", noise_grid=[0.0, 1.0, 2.0], m=300, n=3, k=3,
                         amplitude=1.0, eta=0.1, trials_per_point=1)
        result = run_dense_noise_scaling(spec)
        errors = dict(median_errors(result, "l1"))
        assert errors[0.0] <= 1e-6
        assert 0.0 < errors[1.0] < errors[2.0]
        assert [row.metrics["noise_l1"] for row in result.rows] == [0.0, 1.0, 2.0]

    def test_lower_bound_dense(self):
        spec = SweepSpec(experiment="lower_bound_dense", epsilon_grid=[0.1, 0.19], m=1000, n=2, k=2,
                         amplitude=1.0, trials_per_point=1)
        result = run_lower_bound_dense(spec)
        for row in result.rows:
            assert math.isfinite(row.metrics["noise_ratio"])
            assert row.metrics["noise_l1"] > 0.0
        first = result.rows[0]
        assert first.grid_value == 0.1
        assert first.metrics["estimate_norm"] <= 1e-3 * math.sqrt(2.0)
        assert first.metrics["noise_ratio"] >= 1.0

    def test_p_curve_analytic_only(self):
        spec = SweepSpec(experiment="p_threshold_curve", p_grid=[0.25, 0.5, 1.0], trials_per_point=2)
        result = run_p_threshold_curve(spec)
        assert result.methods == ["analytic"]
        values = [row.metrics["breakdown"] for row in result.rows]
        assert len(values) == 3
        assert values[2] == pytest.approx(eta0(), abs=1e-6)
        assert values[0] > values[1] > values[2]

    def test_p_curve_failed_solve_counts_as_breakdown(self, monkeypatch):
        def failing_solve(*args, **kwargs):
            raise SingularSystemError("weighted system is singular")

        monkeypatch.setattr("app.harness.sweeps.solve", failing_solve)
        spec = SweepSpec(experiment="p_threshold_curve", p_grid=[0.5], eta_grid=[0.0, 0.1], methods=["lp"],
                         m=50, trials_per_point=1)
        result = run_p_threshold_curve(spec, workers=1)
        (row,) = [row for row in result.rows if row.method == "empirical"]
        assert row.metrics == {"breakdown": 0.0, "failed": 1.0}
        assert row.iterations == 0

    def test_minimal_recovery_m(self):
        assert minimal_recovery_m(5, 5, 0.1, seed=1, method="l1") in (64, 128)
        assert minimal_recovery_m(5, 5, 0.1, seed=1, method="l1", start=64, limit=32) is None
        with pytest.raises(UnknownMethodError):
            minimal_recovery_m(5, 5, 0.1, seed=1, method="ransac")


@pytest.mark.slow
class TestAcceptance:
    """Desk-scale reproductions of the breakdown, recovery and lower-bound behavior."""

    @pytest.fixture(scope="class")
    def breakdown_sweep(self):
        spec = SweepSpec(
            experiment="breakdown_1d",
            methods=["l1", "torrent", "filter"],
            eta_grid=parse_grid("0:0.5:0.02"),
            m=1000,
            n=1,
            amplitude=100.0,
            trials_per_point=5,
        )
        return run_breakdown_sweep(spec)

    def test_l1_breakdown(self, breakdown_sweep):
        assert 0.21 <= breakdown_sweep.breakdown["l1"] <= 0.27
        for value, median in median_errors(breakdown_sweep, "l1"):
            if value <= 0.20 + 1e-12:
                assert median <= 1e-3
            if value >= 0.28 - 1e-12:
                assert median >= 0.5

    def test_l1_median_error_nondecreasing(self, breakdown_sweep):
        medians = [median for _, median in median_errors(breakdown_sweep, "l1")]
        assert all(later >= earlier - 1e-9 for earlier, later in zip(medians, medians[1:]))

    def test_baseline_ordering(self, breakdown_sweep):
        assert breakdown_sweep.breakdown["torrent"] < breakdown_sweep.breakdown["l1"]
        assert abs(breakdown_sweep.breakdown["filter"] - breakdown_sweep.breakdown["l1"]) <= 0.04

    def test_sparse_adversary_defeats_l1(self):
        for seed in range(10):
            problem = generate_problem(2000, 10, 10, 1.0, CorruptionSpec(eta=0.28, kind=CorruptionKind.TOPK_ZEROING), seed)
            assert relative_error(l1_regress(problem.X, problem.y).estimate, problem.w_star) >= 0.5

    def test_dense_adversary_drives_l1_to_zero(self):
        spec = SweepSpec(experiment="lower_bound_dense", epsilon_grid=[0.1], m=2000, n=10, k=10,
                         amplitude=1.0, trials_per_point=10)
        result = run_lower_bound_dense(spec)
        w_norm = math.sqrt(10.0)
        for row in result.rows:
            assert row.metrics["estimate_norm"] <= 1e-3 * w_norm
            assert row.metrics["noise_ratio"] >= 1.0
            assert row.metrics["noise_l1"] / 2000 == pytest.approx(big_g(eta0() - 0.05) * w_norm, rel=0.1)

    def test_dense_noise_scaling(self):
        spec = SweepSpec(experiment="dense_noise_scaling", noise_grid=[10.0, 20.0, 40.0, 80.0], m=2000, n=10,
                         k=10, amplitude=1.0, eta=0.1, trials_per_point=5)
        result = run_dense_noise_scaling(spec)
        errors = median_errors(result, "l1")
        scale = errors[0][1] * spec.m / errors[0][0]
        for (c_prev, e_prev), (c, e) in zip(errors, errors[1:]):
            assert 0.4 <= e / e_prev <= 2.5
            # linear in ‖d‖₁ up to the basis changing between grid points
            assert e <= 1.25 * scale * c / spec.m

    def test_sparse_recovery_sample_complexity(self):
        found = [minimal_recovery_m(512, 8, 0.15, seed=seed) for seed in range(20)]
        assert sum(m is not None for m in found) >= 18

    def test_empirical_p_curve(self):
        spec = SweepSpec(experiment="p_threshold_curve", p_grid=[0.5, 1.0], methods=["lp"],
                         eta_grid=parse_grid("0.2:0.46:0.02"), m=1000, trials_per_point=1)
        result = run_p_threshold_curve(spec)
        empirical = {row.grid_value: row.metrics["breakdown"] for row in result.rows_for("empirical")}
        assert empirical[0.5] >= eta0()
        assert empirical[0.5] >= empirical[1.0]
        assert np.isfinite(empirical[1.0])
