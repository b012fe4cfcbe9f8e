# app/eval/summary.py
#
# Prequential summaries and learning curves.
#
# Responsibilities:
# - summarize(): cumulative log-loss, average online accuracy and the
#   per-task / within-task aggregations of one MetricsLog
# - aggregate_curves(): mean and standard error across data seeds
# - Writers for summary (TOML key = value) and curve (x, mean, stderr) files
#

import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from app.errors import StateError
from app.eval.metrics_log import MetricsLog


@dataclass(frozen=True)
class Curve:
    x: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table = np.column_stack([self.x, self.mean, self.stderr])
        np.savetxt(path, table, fmt=("%.17g", "%.17g", "%.17g"), delimiter=",", header="x,mean,stderr", comments="")
        return path


@dataclass
class Summary:
    #
    # Scalar results plus the curves of a single run.
    #
    # Per-task arrays are indexed like task_ids; within-task arrays by the
    # offset inside a task.
    #
    num_examples: int
    cumulative_nll: float
    mean_nll: float
    average_accuracy: float
    macs_total: int
    gradient_steps: int
    running_accuracy: np.ndarray
    task_ids: np.ndarray
    per_task_accuracy: np.ndarray
    per_task_nll: np.ndarray
    within_task_accuracy: np.ndarray
    within_task_nll: np.ndarray

    def scalars(self) -> dict[str, int | float]:
        return {
            "num_examples": self.num_examples,
            "cumulative_nll": self.cumulative_nll,
            "mean_nll": self.mean_nll,
            "average_accuracy": self.average_accuracy,
            "macs_total": self.macs_total,
            "gradient_steps": self.gradient_steps,
            "num_tasks": len(self.task_ids),
        }


def running_average(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    return np.cumsum(values) / np.arange(1, len(values) + 1)


def grouped_mean(keys, values) -> tuple[np.ndarray, np.ndarray]:
    # Mean of values per distinct key, keys sorted ascending
    keys = np.asarray(keys)
    values = np.asarray(values, dtype=np.float64)
    unique, inverse = np.unique(keys, return_inverse=True)
    totals = np.bincount(inverse, weights=values, minlength=len(unique))
    counts = np.bincount(inverse, minlength=len(unique))
    return unique, totals / counts


def summarize(log: MetricsLog, expected_length: int | None = None) -> Summary:
    #
    # Raises:
    #     StateError: If the log is empty or does not cover 0..T-1 exactly once
    #
    if len(log) == 0:
        raise StateError("cannot summarize an empty metrics log")
    log.validate(expected_length)

    task_ids, per_task_accuracy = grouped_mean(log.task_ids, log.correct)
    _, per_task_nll = grouped_mean(log.task_ids, log.nll)
    _, within_task_accuracy = grouped_mean(log.task_positions, log.correct)
    _, within_task_nll = grouped_mean(log.task_positions, log.nll)
    return Summary(
        num_examples=len(log),
        cumulative_nll=float(log.nll.sum()),
        mean_nll=float(log.nll.mean()),
        average_accuracy=float(log.correct.mean()),
        macs_total=int(log.macs_total),
        gradient_steps=int(log.gradient_steps),
        running_accuracy=running_average(log.correct),
        task_ids=task_ids,
        per_task_accuracy=per_task_accuracy,
        per_task_nll=per_task_nll,
        within_task_accuracy=within_task_accuracy,
        within_task_nll=within_task_nll,
    )


def task_range_accuracy(log: MetricsLog, tasks: Iterable[int]) -> float:
    # Mean correctness over all positions of the given tasks
    selected = np.isin(log.task_ids, np.fromiter(tasks, dtype=np.int64))
    if not selected.any():
        raise StateError("no positions fall in the requested tasks")
    return float(log.correct[selected].mean())


def first_last_tasks(log: MetricsLog, count: int) -> tuple[float, float]:
    # Accuracy over the first and over the last `count` tasks of a sequence
    tasks = np.unique(log.task_ids)
    return task_range_accuracy(log, tasks[:count]), task_range_accuracy(log, tasks[-count:])


def within_task_curve(log: MetricsLog, tasks: Iterable[int] | None = None) -> np.ndarray:
    # Mean correctness per offset inside a task, optionally over selected tasks
    selected = np.ones(len(log), dtype=bool) if tasks is None else np.isin(log.task_ids, list(tasks))
    _, means = grouped_mean(log.task_positions[selected], log.correct[selected])
    return means


def aggregate_curves(curves: Sequence[np.ndarray], x=None) -> Curve:
    #
    # Mean and standard error of equally long curves (one per data seed).
    #
    # Raises:
    #     StateError: No curves, or curves of different lengths
    #
    if not curves:
        raise StateError("aggregate_curves needs at least one curve")
    lengths = {len(curve) for curve in curves}
    if len(lengths) != 1:
        raise StateError(f"curves have different lengths: {sorted(lengths)}")
    table = np.vstack([np.asarray(curve, dtype=np.float64) for curve in curves])
    mean = table.mean(axis=0)
    if len(curves) > 1:
        stderr = table.std(axis=0, ddof=1) / math.sqrt(len(curves))
    else:
        stderr = np.zeros_like(mean)
    x = np.arange(table.shape[1]) if x is None else np.asarray(x)
    return Curve(x=x, mean=mean, stderr=stderr)


def aggregate_logs(logs: Sequence[MetricsLog]) -> dict[str, Curve]:
    #
    # Seed-averaged curves of several runs over equally long sequences.
    #
    summaries = [summarize(log) for log in logs]
    return {
        "instantaneous_accuracy": aggregate_curves([log.correct for log in logs]),
        "instantaneous_nll": aggregate_curves([log.nll for log in logs]),
        "running_accuracy": aggregate_curves([s.running_accuracy for s in summaries]),
        "per_task_accuracy": aggregate_curves([s.per_task_accuracy for s in summaries], x=summaries[0].task_ids),
        "per_task_nll": aggregate_curves([s.per_task_nll for s in summaries], x=summaries[0].task_ids),
        "within_task_accuracy": aggregate_curves([s.within_task_accuracy for s in summaries]),
        "within_task_nll": aggregate_curves([s.within_task_nll for s in summaries]),
    }


def write_summary(path: str | Path, summary: Summary, extra: dict | None = None) -> Path:
    #
    # Write the scalar part of a summary as "key = value" lines (valid TOML).
    #
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = {**summary.scalars(), **(extra or {})}
    lines = []
    for key, value in values.items():
        if isinstance(value, str):
            lines.append(f'{key} = "{value}"')
        elif isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {int(value)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_summary(path: str | Path) -> dict:
    with Path(path).open("rb") as handle:
        return tomllib.load(handle)
