# app/eval/__init__.py
#
# Eval Module - prequential metrics, curves, oracle baselines, MAC
# accounting and Pareto fronts.
#
# run_ablation trains models and lives in app.eval.ablations (imported
# directly, since the trainer itself depends on this package).
#

from .metrics_log import CSV_COLUMNS, MetricsLog
from .summary import (
    Curve,
    Summary,
    aggregate_curves,
    aggregate_logs,
    first_last_tasks,
    grouped_mean,
    read_summary,
    running_average,
    summarize,
    task_range_accuracy,
    within_task_curve,
    write_summary,
)
from .oracle import label_lags, oracle_curve, window_oracle, window_oracle_correct
from .macs import TRAINING_MULTIPLIER, linear_macs, macs_breakdown, macs_forward, macs_training_step
from .gradient_stop import GradientStopHook, gradient_stop_schedule
from .pareto import SweepPoint, pareto_front, sensitivity

__all__ = [
    "CSV_COLUMNS",
    "MetricsLog",
    "Curve",
    "Summary",
    "aggregate_curves",
    "aggregate_logs",
    "first_last_tasks",
    "grouped_mean",
    "read_summary",
    "running_average",
    "summarize",
    "task_range_accuracy",
    "within_task_curve",
    "write_summary",
    "label_lags",
    "oracle_curve",
    "window_oracle",
    "window_oracle_correct",
    "TRAINING_MULTIPLIER",
    "linear_macs",
    "macs_breakdown",
    "macs_forward",
    "macs_training_step",
    "GradientStopHook",
    "gradient_stop_schedule",
    "SweepPoint",
    "pareto_front",
    "sensitivity",
]
