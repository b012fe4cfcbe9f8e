# app/cli/runner.py
#
# Orchestration behind the command line.
#
# Responsibilities:
# - run: one training run per (gradient stop, data seed), metric CSVs,
#   summaries and seed-aggregated curves
# - sweep: grid points (optionally in parallel processes), Pareto front
#   and per-axis sensitivity tables
# - oracle: window-oracle accuracy curve of a label sequence
#

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from pydantic import ValidationError

from app.cli.experiment_config import ExperimentConfig, apply_settings, expand_grid
from app.cli.run_logger import RunLogger
from app.data import (
    DataSource,
    SplitSequence,
    blob_dataset_from_spec,
    is_feature_file,
    load_feature_source,
    load_label_file,
)
from app.errors import ConfigurationError, OCLError
from app.eval import (
    Curve,
    MetricsLog,
    Summary,
    SweepPoint,
    aggregate_logs,
    gradient_stop_schedule,
    oracle_curve,
    pareto_front,
    sensitivity,
    summarize,
    write_summary,
)
from app.eval.ablations import apply_ablation
from app.model import OnlineTransformer
from app.streams import train_sequence


@dataclass
class RunResult:
    data_seed: int
    stop_position: int | None
    output_dir: Path
    log: MetricsLog
    summary: Summary


def build_source(config: ExperimentConfig, data_seed: int) -> DataSource:
    #
    # Data source of one run; synthetic data is fully determined by the
    # data seed.
    #
    # Raises:
    #     ConfigurationError: Source incompatible with the model config
    #
    if config.data.feature_file is not None:
        source = load_feature_source(config.data.feature_file)
    else:
        base = blob_dataset_from_spec(config.data.blobs, seed=data_seed)
        source = SplitSequence(base, config.data.sequence.model_copy(update={"seed": data_seed}))

    model = config.model
    if source.num_classes > model.num_classes:
        raise ConfigurationError(
            f"model.num_classes={model.num_classes} is smaller than the {source.num_classes} labels of the data"
        )
    if model.use_image and source.feature_dim != model.feature_dim:
        raise ConfigurationError(f"model.feature_dim={model.feature_dim} differs from data features of width {source.feature_dim}")
    return source


def run_single(
    config: ExperimentConfig,
    data_seed: int,
    output_dir: Path,
    stop_position: int | None = None,
) -> RunResult:
    model_seed = config.trainer.seed
    RunLogger.run_started(data_seed, model_seed, output_dir)
    source = build_source(config, data_seed)
    model = OnlineTransformer(apply_ablation(config.model, config.ablation), seed=model_seed)
    hook = gradient_stop_schedule([stop_position]) if stop_position is not None else None

    checkpoints = output_dir / "checkpoints" if config.trainer.checkpoint_every else None
    log = train_sequence(model, source, config.trainer, hook=hook, checkpoint_dir=checkpoints)
    summary = summarize(log, expected_length=config.trainer.total_examples)

    RunLogger.file_written(log.write_csv(output_dir / "metrics.csv"))
    extra: dict[str, Any] = {"data_seed": data_seed, "model_seed": model_seed}
    if stop_position is not None:
        extra["gradient_stop"] = stop_position
    if config.ablation is not None:
        extra["ablation"] = config.ablation
    RunLogger.file_written(write_summary(output_dir / "summary.toml", summary, extra=extra))
    RunLogger.run_finished(data_seed, summary.average_accuracy, summary.cumulative_nll, summary.macs_total)
    return RunResult(data_seed, stop_position, output_dir, log, summary)


def write_curves(curves: dict[str, Curve], directory: Path) -> None:
    for name, curve in curves.items():
        RunLogger.file_written(curve.write_csv(directory / f"{name}.csv"))


def run_experiment(config: ExperimentConfig, output_dir: Path) -> list[RunResult]:
    #
    # Every gradient-stop position (or a single unstopped run) times every
    # data seed. Layout:
    #   <output_dir>[/stop_<p>]/seed_<s>/{metrics.csv, summary.toml}
    #   <output_dir>[/stop_<p>]/curves/<curve>.csv
    #
    results: list[RunResult] = []
    stops: Sequence[int | None] = config.gradient_stop or [None]
    for stop in stops:
        base = output_dir if stop is None else output_dir / f"stop_{stop}"
        if stop is not None:
            RunLogger.gradient_stop(stop)
        batch = [run_single(config, seed, base / f"seed_{seed}", stop) for seed in config.data_seeds]
        write_curves(aggregate_logs([result.log for result in batch]), base / "curves")
        results.extend(batch)
    return results


def _run_point(payload: tuple[int, str, dict[str, Any], str]) -> SweepPoint:
    # Process-pool entry: rebuild the config, run all seeds, never raise
    index, config_json, settings, output_dir = payload
    point = SweepPoint(settings=settings)
    RunLogger.point_started(index, settings)
    try:
        config = apply_settings(ExperimentConfig.model_validate_json(config_json), settings)
        results = run_experiment(config, Path(output_dir) / f"point_{index:03d}")
    except (OCLError, ValidationError) as exc:
        point.error = str(exc).replace("\n", " ")
        RunLogger.point_failed(index, point.error)
        return point
    except Exception as exc:
        point.error = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        RunLogger.point_failed(index, point.error)
        return point
    point.accuracy = sum(r.summary.average_accuracy for r in results) / len(results)
    point.macs_total = round(sum(r.summary.macs_total for r in results) / len(results))
    point.extras["cumulative_nll"] = sum(r.summary.cumulative_nll for r in results) / len(results)
    return point


def _write_points(path: Path, axes: list[str], points: Sequence[SweepPoint]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([*axes, "macs_total", "accuracy", "error"])
        for point in points:
            writer.writerow(
                [*(point.settings[axis] for axis in axes), point.macs_total, repr(point.accuracy), point.error or ""]
            )
    return path


def sweep(config: ExperimentConfig, grid: dict[str, list], output_dir: Path, workers: int = 1) -> list[SweepPoint]:
    #
    # Run every grid point; failures are recorded and the sweep continues.
    #
    # Writes sweep_points.csv, pareto_front.csv and sensitivity_<axis>.csv
    # (best accuracy per axis value) under output_dir.
    #
    settings_list = expand_grid(grid)
    RunLogger.sweep_started(len(settings_list), workers)
    config_json = config.model_dump_json()
    payloads = [(index, config_json, settings, str(output_dir)) for index, settings in enumerate(settings_list)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_run_point, payloads))
    else:
        points = [_run_point(payload) for payload in payloads]

    axes = sorted(grid)
    front = pareto_front(points)
    RunLogger.file_written(_write_points(output_dir / "sweep_points.csv", axes, points))
    RunLogger.file_written(_write_points(output_dir / "pareto_front.csv", axes, front))
    for axis in axes:
        path = output_dir / f"sensitivity_{axis.replace('.', '_')}.csv"
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([axis, "best_accuracy"])
            writer.writerows((value, repr(best)) for value, best in sensitivity(points, axis))
        RunLogger.file_written(path)
    RunLogger.pareto_front(len(front), len(points))
    return points


def run_oracle(path: str | Path, windows: Sequence[int], output_dir: Path) -> Curve:
    # Labels come from an OCLF feature file or a plain label file
    labels = load_feature_source(path).labels() if is_feature_file(path) else load_label_file(path)
    curve = oracle_curve(labels, windows)
    for window, accuracy in zip(curve.x, curve.mean):
        RunLogger.oracle_result(int(window), float(accuracy))
    RunLogger.file_written(curve.write_csv(output_dir / "oracle_curve.csv"))
    return curve
