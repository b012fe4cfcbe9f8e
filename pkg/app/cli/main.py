# app/cli/main.py
#
# Command line entry point:
#
#   ocl run <config.toml>                 [--output-dir D] [--data-seed N] [--model-seed N]
#   ocl sweep <config.toml> <grid.toml>   [--workers N] ...
#   ocl oracle <feature-or-label-file> --window W [W ...]
#
# Exit codes: 0 success, 2 invalid configuration or input, 3 non-finite
# loss during training.
#

import argparse
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv
from pydantic import ValidationError

from app.cli.experiment_config import load_experiment_config, load_grid
from app.cli.runner import run_experiment, run_oracle, sweep
from app.errors import ConfigurationError, DataExhaustedError, FormatError, NonFiniteError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NON_FINITE = 3

LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def configure_logging() -> None:
    level = os.getenv("OCL_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocl", description="Online continual learning with replay streams")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_common(command: argparse.ArgumentParser) -> None:
        command.add_argument("--output-dir", type=Path, default=None, help="Directory for all outputs")
        command.add_argument("--data-seed", type=int, default=None, help="Run a single data seed")
        command.add_argument("--model-seed", type=int, default=None, help="Override trainer.seed")

    run = commands.add_parser("run", help="Train on every configured data seed")
    run.add_argument("config", type=Path)
    add_common(run)

    sweep_cmd = commands.add_parser("sweep", help="Run a hyper-parameter grid and report the Pareto front")
    sweep_cmd.add_argument("config", type=Path)
    sweep_cmd.add_argument("grid", type=Path)
    sweep_cmd.add_argument("--workers", type=int, default=1, help="Parallel processes")
    add_common(sweep_cmd)

    oracle = commands.add_parser("oracle", help="Window-oracle accuracy of a label sequence")
    oracle.add_argument("input", type=Path, help="OCLF feature file or one-label-per-line file")
    oracle.add_argument("--window", type=int, nargs="+", required=True)
    oracle.add_argument("--output-dir", type=Path, default=None)
    return parser


def _print_validation_error(exc: ValidationError) -> None:
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        message = error["msg"].removeprefix("Value error, ")
        print(f"{location}: {message}" if location else message, file=sys.stderr)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "oracle":
        output_dir = args.output_dir or Path(os.getenv("OCL_OUTPUT_DIR", "runs"))
        curve = run_oracle(args.input, args.window, output_dir)
        for window, accuracy in zip(curve.x, curve.mean):
            print(f"window = {int(window)}, accuracy = {accuracy:.6f}")
        return EXIT_OK

    config = load_experiment_config(args.config).with_overrides(args.data_seed, args.model_seed)
    output_dir = config.resolved_output_dir(args.output_dir)
    if args.command == "run":
        for result in run_experiment(config, output_dir):
            print(
                f"[{result.output_dir}] average_accuracy = {result.summary.average_accuracy:.6f}, "
                f"cumulative_nll = {result.summary.cumulative_nll:.4f}, macs_total = {result.summary.macs_total}"
            )
        return EXIT_OK

    if args.workers < 1:
        raise ConfigurationError(f"--workers must be >= 1, got {args.workers}")
    points = sweep(config, load_grid(args.grid), output_dir, workers=args.workers)
    failed = sum(1 for point in points if point.error)
    print(f"{len(points)} points, {failed} failed; results in {output_dir}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ValidationError as exc:
        _print_validation_error(exc)
        return EXIT_CONFIG
    except (ConfigurationError, FormatError, DataExhaustedError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NON_FINITE


if __name__ == "__main__":
    sys.exit(main())
