"""
Command-line interface.

    python -m app solve --X X.csv --y y.csv --method l1
    python -m app gen --m 2000 --n 10 --eta 0.15 --out problems/run1
    python -m app sweep --config configs/breakdown_1d.cfg --out results/breakdown_1d.csv
    python -m app certify --problem problems/run1 --k 1 --eta 0.1 --alpha 2
    python -m app analytics --eta0

Exit status: 0 on success, 1 on usage errors (bad flags, missing files,
parameters out of range), 2 on numerical failures and, with --strict, on
solves that stop without converging.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from app.analytics import analytics_table, breakdown_threshold, eta0
from app.certificates import estimate_robust_constants, verify_shelling_numerically
from app.core.config import get_settings
from app.core.exceptions import USAGE_ERRORS, RobustRegressionError
from app.core.sentry import capture_exception, capture_message, init_sentry
from app.harness import load_sweep_config, parse_grid, run_sweep, write_sweep_csv, write_sweep_json
from app.harness.output import sweep_to_csv
from app.numerics import read_matrix_csv, read_vector_csv, write_matrix_csv, write_vector_csv
from app.problems import CorruptionKind, CorruptionSpec, generate_problem, load_problem, save_problem, scaled_dense_noise
from app.solvers import METHODS, SolverOptions, relative_error, solve

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ==================== Parser ====================

def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="Seed for any randomness (default: 0)")
    parser.add_argument("--out", type=Path, help="Output path")
    parser.add_argument("--strict", action="store_true", help="Exit 2 when a solve does not converge")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robust-l1", description="L1 robust regression lab")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="Solve one regression instance")
    p.add_argument("--X", dest="X", type=Path, help="Design matrix CSV")
    p.add_argument("--y", dest="y", type=Path, help="Response vector CSV")
    p.add_argument("--problem", type=Path, help="Problem directory written by `gen`")
    p.add_argument("--method", default="l1", help=f"One of: {', '.join(METHODS)}")
    p.add_argument("--eta", type=float, help="Corruption fraction (torrent, filter)")
    p.add_argument("--lambda", dest="lam", type=float, help="L1-ball radius (l1_constrained)")
    p.add_argument("--p", type=float, help="Exponent in (0, 1) (lp)")
    _common(p)

    p = sub.add_parser("gen", help="Generate a problem directory")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, help="Signal sparsity (default: n)")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--adversary", default=CorruptionKind.TOPK_ZEROING.value,
                   choices=[kind.value for kind in CorruptionKind])
    p.add_argument("--epsilon", type=float, default=0.1, help="dense_adversary slack")
    p.add_argument("--magnitude", type=float, default=1.0, help="random_sign magnitude")
    p.add_argument("--noise-l1", type=float, default=0.0, help="‖d‖₁ of random dense noise")
    _common(p)

    p = sub.add_parser("sweep", help="Run an experiment sweep from a config file")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--method", help="Comma-separated methods overriding the config")
    p.add_argument("--json", type=Path, help="Also write a JSON summary here")
    p.add_argument("--workers", type=int, help="Process-pool size (default from settings)")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    _common(p)

    p = sub.add_parser("certify", help="Estimate robustness constants of a design")
    p.add_argument("--X", dest="X", type=Path, help="Design matrix CSV")
    p.add_argument("--problem", type=Path, help="Problem directory written by `gen`")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--alpha", type=float, help="Also check the shelling sandwich with this α")
    p.add_argument("--delta", type=float, default=0.0, help="Cone slack Δ for the shelling check")
    _common(p)

    p = sub.add_parser("analytics", help="Gaussian tail quantities")
    p.add_argument("--eta0", action="store_true", help="Print η₀ to 6 decimals")
    p.add_argument("--table", action="store_true", help="Print the G/B table on --grid")
    p.add_argument("--grid", default="0:1:0.01", help="γ grid as start:stop:step (default 0:1:0.01)")
    p.add_argument("--p", type=float, default=1.0, help="Moment exponent in (0, 1]")
    p.add_argument("--breakdown", action="store_true", help="Print the ℓp breakdown point for --p")
    _common(p)

    return parser


# ==================== Commands ====================

def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _format_vector(v: np.ndarray) -> str:
    return ",".join(format(float(x), ".17g") for x in v)


def cmd_solve(args) -> int:
    truth = None
    if args.problem is not None:
        problem = load_problem(args.problem)
        X, y, truth = problem.X, problem.y, problem.w_star
    elif args.X is not None and args.y is not None:
        X, y = read_matrix_csv(args.X), read_vector_csv(args.y)
    else:
        raise UsageError("solve needs --problem or both --X and --y")

    opts = SolverOptions.from_settings(seed=args.seed or 0)
    result = solve(args.method, X, y, lam=args.lam, p=args.p, eta=args.eta, opts=opts)

    lines = [f"{key}={value}" for key, value in result.summary().items()]
    if truth is not None:
        lines.append(f"relative_error={relative_error(result.estimate, truth):.17g}")
    lines.append(f"estimate={_format_vector(result.estimate)}")
    sys.stdout.write("\n".join(lines) + "\n")

    if args.out is not None:
        write_vector_csv(args.out, result.estimate)

    if args.strict and not result.converged:
        print(f"robust-l1: {args.method} did not converge after {result.iterations} iterations", file=sys.stderr)
        capture_message(f"{args.method} did not converge", level="warning", extra={"iterations": result.iterations})
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.out is None:
        raise UsageError("gen needs --out DIR")
    spec = CorruptionSpec(
        eta=args.eta,
        kind=CorruptionKind(args.adversary),
        magnitude=args.magnitude,
        epsilon=args.epsilon,
    )
    dense = None
    if args.noise_l1 > 0.0:
        l1 = args.noise_l1
        dense = lambda m, seed: scaled_dense_noise(m, l1, seed)  # noqa: E731
    problem = generate_problem(args.m, args.n, args.k or args.n, args.amplitude, spec, args.seed or 0, dense_noise=dense)
    save_problem(problem, args.out)
    print(f"wrote {problem.m}x{problem.n} {problem.adversary_name} problem to {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_sweep_config(args.config)
    updates = {}
    if args.method:
        updates["methods"] = [name.strip() for name in args.method.split(",") if name.strip()]
    if args.seed is not None:
        updates["base_seed"] = args.seed
    if updates:
        spec = spec.model_validate({**spec.model_dump(), **updates})

    result = run_sweep(spec, workers=args.workers, progress=args.progress or None)
    if args.out is None:
        sys.stdout.write(sweep_to_csv(result))
    else:
        write_sweep_csv(result, args.out)
    if args.json is not None:
        write_sweep_json(result, args.json)
    for method, value in result.breakdown.items():
        print(f"breakdown[{method}]={'none' if value is None else format(value, '.6g')}", file=sys.stderr)

    if args.strict and not all(row.converged for row in result.rows):
        print("robust-l1: some solves did not converge", file=sys.stderr)
        capture_message("sweep had unconverged solves", level="warning", extra={"experiment": spec.experiment.value})
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_certify(args) -> int:
    support = None
    if args.problem is not None:
        problem = load_problem(args.problem)
        X = problem.X
        support = np.flatnonzero(problem.w_star)
    elif args.X is not None:
        X = read_matrix_csv(args.X)
    else:
        raise UsageError("certify needs --problem or --X")

    seed = args.seed or 0
    report = estimate_robust_constants(X, args.k, args.eta, args.trials, seed)
    text = report.to_key_value()

    passed = True
    if args.alpha is not None:
        if support is None or support.shape[0] == 0:
            support = np.arange(min(args.k, X.shape[1]))
        check = verify_shelling_numerically(X, support.tolist(), args.alpha, args.delta, args.trials, seed)
        passed = check.passed
        text += (
            f"shelling_passed={str(check.passed).lower()}\n"
            f"shelling_worst_margin={check.worst_margin:.17g}\n"
            f"shelling_L={check.measured_L:.17g}\n"
            f"shelling_U={check.measured_U:.17g}\n"
        )
    sys.stdout.write(text)

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.txt").write_text(text, encoding="utf-8")
        write_matrix_csv(args.out / "witnesses.csv", np.column_stack([report.witness_min, report.witness_max]))

    if args.strict and not passed:
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_analytics(args) -> int:
    if not (args.eta0 or args.table or args.breakdown):
        raise UsageError("analytics needs --eta0, --table or --breakdown")
    chunks = []
    if args.eta0:
        chunks.append(f"{eta0():.6f}\n")
    if args.breakdown:
        chunks.append(f"{breakdown_threshold(args.p):.6f}\n")
    if args.table:
        chunks.append(analytics_table(parse_grid(args.grid), args.p).to_csv())
    _emit("".join(chunks), args.out)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "gen": cmd_gen,
    "sweep": cmd_sweep,
    "certify": cmd_certify,
    "analytics": cmd_analytics,
}


# ==================== Entry Point ====================

def cli_main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"robust-l1: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)

    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    init_sentry()

    if args.command is None:
        print("robust-l1: error: a subcommand is required", file=sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except (UsageError, OSError, ValueError) + USAGE_ERRORS as e:
        print(f"robust-l1: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RobustRegressionError as e:
        logger.error(f"{args.command} failed: {e}")
        capture_exception(e, extra={"command": args.command})
        print(f"robust-l1: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as e:
        logger.error(f"Unhandled exception in {args.command}: {e}", exc_info=True)
        capture_exception(e, extra={"command": args.command})
        print(f"robust-l1: internal error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
