# app/data/readers.py
#
# Deterministic, restartable sequential readers.
#
# A DataSource is an immutable, position-addressable sequence of examples.
# A SequenceReader is a cursor over a source; every stream owns its own
# reader, so resetting or advancing one never affects another.
#

from abc import ABC, abstractmethod

import numpy as np

from app.errors import DataExhaustedError, DimensionError
from app.model.config import Example


class DataSource(ABC):
    #
    # Position-addressable example sequence.
    #
    # Subclasses provide the length, the observed label count and
    # example_at(); everything else derives from those.
    #
    num_classes: int
    feature_dim: int

    @abstractmethod
    def __len__(self) -> int: ...

    @abstractmethod
    def example_at(self, position: int) -> Example: ...

    @abstractmethod
    def labels(self) -> np.ndarray:
        # All labels in order (used by the window oracle)
        ...

    def examples(self, start: int, stop: int) -> list[Example]:
        return [self.example_at(position) for position in range(start, stop)]

    def reader(self) -> "SequenceReader":
        return SequenceReader(self)


class SequenceReader:
    def __init__(self, source: DataSource):
        self.source = source
        self.position = 0

    @property
    def remaining(self) -> int:
        return len(self.source) - self.position

    def read(self, count: int) -> list[Example]:
        #
        # Return the next `count` examples and advance.
        #
        # Raises:
        #     DataExhaustedError: If fewer than `count` examples remain
        #
        if count > self.remaining:
            raise DataExhaustedError(
                f"reader at position {self.position} asked for {count} examples, "
                f"only {self.remaining} of {len(self.source)} remain"
            )
        chunk = self.source.examples(self.position, self.position + count)
        self.position += count
        return chunk

    def seek(self, position: int) -> None:
        if not 0 <= position <= len(self.source):
            raise DataExhaustedError(f"cannot seek to {position} in a source of {len(self.source)} examples")
        self.position = position

    def reset(self) -> None:
        self.position = 0

    def __iter__(self) -> "SequenceReader":
        return self

    def __next__(self) -> Example:
        if self.remaining <= 0:
            raise StopIteration
        return self.read(1)[0]


class ArraySource(DataSource):
    #
    # In-memory source backed by explicit arrays.
    #
    # Args:
    #     features: [T, F] (F may be 1 for label-only sequences)
    #     labels: [T] integers in [0, num_classes)
    #     num_classes: Defaults to max(label) + 1
    #     task_ids / task_positions: Optional per-example annotations
    #
    def __init__(
        self,
        features,
        labels,
        num_classes: int | None = None,
        task_ids=None,
        task_positions=None,
    ):
        self.features = np.asarray(features)
        self._labels = np.asarray(labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] != self._labels.shape[0]:
            raise DimensionError(f"ArraySource: features {self.features.shape} vs labels {self._labels.shape}")
        self.num_classes = int(num_classes if num_classes is not None else (self._labels.max(initial=-1) + 1))
        self.feature_dim = self.features.shape[1]
        length = len(self._labels)
        self.task_ids = np.zeros(length, np.int64) if task_ids is None else np.asarray(task_ids, np.int64)
        self.task_positions = (
            np.arange(length, dtype=np.int64) if task_positions is None else np.asarray(task_positions, np.int64)
        )

    @classmethod
    def from_labels(cls, labels, num_classes: int | None = None, feature_dim: int = 1) -> "ArraySource":
        # Label-only sequence with zero features
        labels = np.asarray(labels, dtype=np.int64)
        return cls(np.zeros((len(labels), feature_dim)), labels, num_classes=num_classes)

    def __len__(self) -> int:
        return len(self._labels)

    def example_at(self, position: int) -> Example:
        return Example(
            features=self.features[position],
            label=int(self._labels[position]),
            task_id=int(self.task_ids[position]),
            task_position=int(self.task_positions[position]),
        )

    def labels(self) -> np.ndarray:
        return self._labels.copy()
