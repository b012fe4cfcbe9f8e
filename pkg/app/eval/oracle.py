# app/eval/oracle.py
#
# Window oracle: position t counts as correct iff y_t occurred among the
# W most recent labels y_{t-1}..y_{t-W}.
#

from typing import Iterable

import numpy as np

from app.errors import ConfigurationError
from app.eval.summary import Curve


def label_lags(labels) -> np.ndarray:
    # Distance to the previous occurrence of the same label (0 if none)
    lags = np.zeros(len(labels), dtype=np.int64)
    last_seen: dict[int, int] = {}
    for position, label in enumerate(np.asarray(labels, dtype=np.int64).tolist()):
        if label in last_seen:
            lags[position] = position - last_seen[label]
        last_seen[label] = position
    return lags


def window_oracle_correct(labels, window: int) -> np.ndarray:
    if window < 1:
        raise ConfigurationError(f"oracle window must be >= 1, got {window}")
    lags = label_lags(labels)
    return (lags > 0) & (lags <= window)


def window_oracle(labels, window: int) -> float:
    #
    # Average accuracy of the window oracle over all positions.
    #
    # Example: window_oracle([0, 0, 1, 0], 1) == 0.25
    #
    labels = np.asarray(labels)
    if len(labels) == 0:
        return 0.0
    return float(window_oracle_correct(labels, window).mean())


def oracle_curve(labels, windows: Iterable[int]) -> Curve:
    # Oracle accuracy as a function of W (stderr column left at 0)
    windows = np.asarray(sorted(set(windows)), dtype=np.int64)
    lags = label_lags(labels)
    if len(windows) and windows[0] < 1:
        raise ConfigurationError(f"oracle window must be >= 1, got {int(windows[0])}")
    accuracy = np.array([float(((lags > 0) & (lags <= w)).mean()) if len(lags) else 0.0 for w in windows])
    return Curve(x=windows, mean=accuracy, stderr=np.zeros_like(accuracy))
