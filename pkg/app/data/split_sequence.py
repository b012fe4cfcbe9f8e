# app/data/split_sequence.py
#
# Piecewise-stationary task sequence built from a base dataset.
#
# Each task picks `ways` distinct base classes, assigns them a random
# bijection onto the observed labels 0..ways-1 and draws examples_per_task
# examples uniformly (with replacement) from those classes. Task k draws
# from its own generator seeded by (seed, k), so any task can be rebuilt
# independently of the others.
#

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.data.base_dataset import BaseDataset
from app.data.readers import DataSource, SequenceReader
from app.errors import ConfigurationError
from app.model.config import Example

logger = logging.getLogger(__name__)


class SequenceSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_tasks: int = Field(100, ge=1)
    examples_per_task: int = Field(500, ge=1)
    ways: int = Field(10, ge=1)
    seed: int = 0

    @property
    def length(self) -> int:
        return self.num_tasks * self.examples_per_task


class SplitSequence(DataSource):
    #
    # Immutable Split-style sequence.
    #
    # Attributes (all [T] arrays):
    #     base_classes: Base class of each example
    #     pool_indices: Row of the example within its class pool
    #     observed_labels: Label the learner sees
    #     task_ids / task_positions: Task index and offset within the task
    #
    def __init__(self, base: BaseDataset, spec: SequenceSpec):
        if spec.ways > base.num_classes:
            raise ConfigurationError(
                f"sequence.ways={spec.ways} exceeds the {base.num_classes} classes of the base dataset"
            )
        self.base = base
        self.spec = spec
        self.num_classes = spec.ways
        self.feature_dim = base.feature_dim

        per_task = spec.examples_per_task
        self.base_classes = np.empty(spec.length, dtype=np.int64)
        self.pool_indices = np.empty(spec.length, dtype=np.int64)
        self.observed_labels = np.empty(spec.length, dtype=np.int64)
        self.task_classes = np.empty((spec.num_tasks, spec.ways), dtype=np.int64)
        for task in range(spec.num_tasks):
            classes, slots, rows = self._sample_task(task)
            window = slice(task * per_task, (task + 1) * per_task)
            self.task_classes[task] = classes
            self.base_classes[window] = classes[slots]
            self.observed_labels[window] = slots
            self.pool_indices[window] = rows
        self.task_ids = np.repeat(np.arange(spec.num_tasks, dtype=np.int64), per_task)
        self.task_positions = np.tile(np.arange(per_task, dtype=np.int64), spec.num_tasks)
        logger.debug("split sequence: %d tasks x %d examples, %d-way, seed=%d", spec.num_tasks, per_task, spec.ways, spec.seed)

    def _sample_task(self, task: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # classes[label] is the base class shown as `label` in this task
        rng = np.random.default_rng([self.spec.seed, task])
        chosen = rng.choice(self.base.num_classes, size=self.spec.ways, replace=False)
        classes = chosen[rng.permutation(self.spec.ways)]
        slots = rng.integers(0, self.spec.ways, size=self.spec.examples_per_task)
        pool_sizes = np.array([len(self.base.pools[c]) for c in classes])
        rows = (rng.random(self.spec.examples_per_task) * pool_sizes[slots]).astype(np.int64)
        return classes, slots, rows

    def __len__(self) -> int:
        return self.spec.length

    def example_at(self, position: int) -> Example:
        base_class = self.base_classes[position]
        return Example(
            features=self.base.pools[base_class][self.pool_indices[position]],
            label=int(self.observed_labels[position]),
            task_id=int(self.task_ids[position]),
            task_position=int(self.task_positions[position]),
        )

    def labels(self) -> np.ndarray:
        return self.observed_labels.copy()


def make_split_sequence(base: BaseDataset, spec: SequenceSpec) -> SequenceReader:
    # Reader at position 0 over a freshly built sequence
    return SplitSequence(base, spec).reader()
