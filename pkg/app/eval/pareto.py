# app/eval/pareto.py
#
# Accuracy/compute trade-offs of sweep points.
#

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np


@dataclass
class SweepPoint:
    settings: dict[str, Any]
    macs_total: int = 0
    accuracy: float = float("nan")
    error: str | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.error is None and np.isfinite(self.accuracy)


def pareto_front(points: Sequence[SweepPoint]) -> list[SweepPoint]:
    #
    # Non-dominated points, ordered by increasing MACs.
    #
    # A point is kept only if it is strictly more accurate than every
    # cheaper-or-equal point; failed points never enter the front.
    #
    ranked = sorted((p for p in points if p.ok), key=lambda p: (p.macs_total, -p.accuracy))
    front: list[SweepPoint] = []
    for point in ranked:
        if not front or point.accuracy > front[-1].accuracy:
            front.append(point)
    return front


def sensitivity(points: Sequence[SweepPoint], axis: str) -> list[tuple[Any, float]]:
    # Best accuracy for each value of one grid axis, over all other axes
    best: dict[Any, float] = {}
    for point in points:
        if not point.ok or axis not in point.settings:
            continue
        value = point.settings[axis]
        best[value] = max(best.get(value, -np.inf), point.accuracy)
    return sorted(best.items(), key=lambda item: item[0])
