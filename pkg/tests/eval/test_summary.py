# tests/eval/test_summary.py
# Unit tests for metrics logs, summaries and seed-averaged curves

import math

import numpy as np
import pytest

from app.errors import FormatError, StateError
from app.eval import (
    MetricsLog,
    aggregate_curves,
    aggregate_logs,
    first_last_tasks,
    read_summary,
    running_average,
    summarize,
    within_task_curve,
    write_summary,
)


def _log(nll, correct, task_ids=None, task_positions=None):
    length = len(nll)
    return MetricsLog(
        positions=np.arange(length),
        nll=nll,
        correct=correct,
        task_ids=np.zeros(length) if task_ids is None else task_ids,
        task_positions=np.arange(length) if task_positions is None else task_positions,
    )


# ============================================================================
# SCALARS
# ============================================================================

def test_uniform_predictor_cumulative_nll():
    summary = summarize(_log(np.full(100, math.log(10)), np.zeros(100)))

    assert summary.cumulative_nll == pytest.approx(230.2585, abs=1e-4)
    assert summary.mean_nll == pytest.approx(math.log(10))


def test_perfect_predictor():
    summary = summarize(_log(np.zeros(50), np.ones(50)))

    assert summary.cumulative_nll == 0.0
    assert summary.average_accuracy == 1.0


def test_average_accuracy_is_mean_of_flags():
    correct = np.random.default_rng(0).integers(0, 2, size=77)
    summary = summarize(_log(np.ones(77), correct))

    assert summary.average_accuracy == float(correct.mean())
    assert summary.running_accuracy[-1] == pytest.approx(summary.average_accuracy)


def test_cumulative_nll_adds_over_concatenation():
    rng = np.random.default_rng(1)
    first = _log(rng.uniform(0, 3, 30), rng.integers(0, 2, 30))
    second = _log(rng.uniform(0, 3, 20), rng.integers(0, 2, 20))
    joined = MetricsLog.concatenate([first, second])

    assert summarize(joined).cumulative_nll == pytest.approx(
        summarize(first).cumulative_nll + summarize(second).cumulative_nll
    )
    np.testing.assert_array_equal(joined.positions, np.arange(50))


# ============================================================================
# INCOMPLETE LOGS
# ============================================================================

def test_empty_log_is_rejected():
    with pytest.raises(StateError):
        summarize(MetricsLog())


def test_log_shorter_than_expected_is_rejected():
    with pytest.raises(StateError):
        summarize(_log(np.ones(10), np.ones(10)), expected_length=12)


def test_gap_in_positions_is_rejected():
    log = _log(np.ones(3), np.ones(3))
    log.positions = np.array([0, 2, 3])

    with pytest.raises(StateError):
        summarize(log)


def test_mismatched_columns_are_rejected():
    with pytest.raises(StateError):
        MetricsLog(positions=np.arange(3), nll=np.ones(2), correct=np.ones(3), task_ids=np.zeros(3), task_positions=np.arange(3))


# ============================================================================
# TASK CURVES
# ============================================================================

def test_per_task_and_within_task_means():
    correct = np.array([0, 0, 1, 1, 0, 1, 1, 1])
    log = _log(np.ones(8), correct, task_ids=np.repeat([0, 1], 4), task_positions=np.tile(np.arange(4), 2))
    summary = summarize(log)

    np.testing.assert_allclose(summary.per_task_accuracy, [0.5, 0.75])
    np.testing.assert_allclose(summary.within_task_accuracy, [0.0, 0.5, 1.0, 1.0])
    np.testing.assert_allclose(within_task_curve(log, tasks=[1]), [0, 1, 1, 1])
    assert first_last_tasks(log, 1) == (0.5, 0.75)


def test_running_average():
    np.testing.assert_allclose(running_average([1, 0, 1, 1]), [1.0, 0.5, 2 / 3, 0.75])


def test_aggregate_curves_mean_and_stderr():
    curve = aggregate_curves([np.array([0.0, 1.0]), np.array([1.0, 1.0]), np.array([2.0, 1.0])])

    np.testing.assert_allclose(curve.mean, [1.0, 1.0])
    np.testing.assert_allclose(curve.stderr, [1.0 / math.sqrt(3), 0.0])


def test_aggregate_curves_rejects_ragged_input():
    with pytest.raises(StateError):
        aggregate_curves([np.ones(3), np.ones(4)])


def test_aggregate_logs_produces_every_curve():
    rng = np.random.default_rng(2)
    logs = [_log(rng.uniform(0, 1, 12), rng.integers(0, 2, 12), np.repeat([0, 1, 2], 4), np.tile(np.arange(4), 3)) for _ in range(3)]
    curves = aggregate_logs(logs)

    assert set(curves) == {
        "instantaneous_accuracy",
        "instantaneous_nll",
        "running_accuracy",
        "per_task_accuracy",
        "per_task_nll",
        "within_task_accuracy",
        "within_task_nll",
    }
    assert len(curves["per_task_accuracy"].x) == 3
    assert len(curves["within_task_nll"].mean) == 4


# ============================================================================
# FILES
# ============================================================================

def test_csv_round_trip_preserves_summary(temp_directory):
    rng = np.random.default_rng(3)
    log = _log(rng.uniform(0, 3, 40), rng.integers(0, 2, 40), np.repeat([0, 1], 20), np.tile(np.arange(20), 2))
    restored = MetricsLog.read_csv(log.write_csv(temp_directory / "metrics.csv"))

    assert summarize(restored).cumulative_nll == summarize(log).cumulative_nll
    assert summarize(restored).average_accuracy == summarize(log).average_accuracy


def test_csv_header(temp_directory):
    path = _log(np.ones(2), np.ones(2)).write_csv(temp_directory / "metrics.csv")

    assert path.read_text().splitlines()[0] == "t,nll,correct,task_id,within_task_pos"


def test_csv_with_foreign_header_is_rejected(temp_directory):
    path = temp_directory / "metrics.csv"
    path.write_text("a,b\n1,2\n")

    with pytest.raises(FormatError):
        MetricsLog.read_csv(path)


def test_summary_file_round_trip(temp_directory):
    summary = summarize(_log(np.full(10, 0.5), np.ones(10)))
    path = write_summary(temp_directory / "summary.toml", summary, extra={"data_seed": 4, "ablation": "none"})
    values = read_summary(path)

    assert values["cumulative_nll"] == 5.0
    assert values["average_accuracy"] == 1.0
    assert values["num_examples"] == 10
    assert values["data_seed"] == 4
    assert values["ablation"] == "none"
