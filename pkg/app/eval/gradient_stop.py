# app/eval/gradient_stop.py
#
# Gradient-stop schedule: parameters freeze once the reporting stream
# passes a position; forward passes and cache updates continue, so the
# model keeps adapting in context only.
#

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class GradientStopHook:
    stop_position: int

    def allows_update(self, chunk_end: int) -> bool:
        # A chunk [start, chunk_end) may update only if it ends by the stop
        return chunk_end <= self.stop_position


def gradient_stop_schedule(positions: Sequence[int]) -> GradientStopHook | None:
    # Freeze at the earliest listed position; no positions means no hook
    if not positions:
        return None
    return GradientStopHook(stop_position=int(min(positions)))
