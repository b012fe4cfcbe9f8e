# app/numerics/mac_counter.py
#
# Operation-level multiply-accumulate (MAC) counter.
#
# matmul reports every product it performs to the counters that are active
# at that moment. Counting is opt-in: outside a count_macs() block nothing
# is recorded.
#

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator


@dataclass
class MacCounter:
    # Forward and backward MACs seen while the counter was active
    forward: int = 0
    backward: int = 0

    @property
    def total(self) -> int:
        return self.forward + self.backward


_ACTIVE: list[MacCounter] = []


@contextmanager
def count_macs() -> Iterator[MacCounter]:
    #
    # Activate a fresh counter for the duration of the block.
    #
    # Returns:
    #     MacCounter that accumulates MACs of every matmul executed inside
    #
    counter = MacCounter()
    _ACTIVE.append(counter)
    try:
        yield counter
    finally:
        _ACTIVE.remove(counter)


def record_forward(macs: int) -> None:
    for counter in _ACTIVE:
        counter.forward += macs


def record_backward(macs: int) -> None:
    for counter in _ACTIVE:
        counter.backward += macs
