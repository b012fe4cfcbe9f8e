# app/eval/metrics_log.py
#
# Per-position prequential records of the reporting stream.
#

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from app.errors import FormatError, StateError

CSV_COLUMNS = ("t", "nll", "correct", "task_id", "within_task_pos")
_CSV_FORMATS = ("%d", "%.17g", "%d", "%d", "%d")


@dataclass
class MetricsLog:
    #
    # Column arrays, one row per stream-0 position.
    #
    # macs_total and gradient_steps describe the whole training run that
    # produced the log (replay streams included).
    #
    positions: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    nll: np.ndarray = field(default_factory=lambda: np.zeros(0, np.float64))
    correct: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    task_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    task_positions: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    macs_total: int = 0
    gradient_steps: int = 0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.int64)
        self.nll = np.asarray(self.nll, dtype=np.float64)
        self.correct = np.asarray(self.correct, dtype=np.int64)
        self.task_ids = np.asarray(self.task_ids, dtype=np.int64)
        self.task_positions = np.asarray(self.task_positions, dtype=np.int64)
        lengths = {len(self.positions), len(self.nll), len(self.correct), len(self.task_ids), len(self.task_positions)}
        if len(lengths) != 1:
            raise StateError(f"MetricsLog columns have different lengths: {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.positions)

    def validate(self, expected_length: int | None = None) -> None:
        #
        # Raises:
        #     StateError: Positions are not exactly 0..T-1 in order, or an
        #         NLL is negative or non-finite
        #
        length = len(self) if expected_length is None else expected_length
        if len(self) != length or not np.array_equal(self.positions, np.arange(length)):
            raise StateError(f"metrics log covers {len(self)} positions, expected 0..{length - 1} in order")
        if not np.all(np.isfinite(self.nll)) or np.any(self.nll < 0):
            raise StateError("metrics log holds negative or non-finite NLL values")

    @classmethod
    def concatenate(cls, logs: list["MetricsLog"]) -> "MetricsLog":
        # Later logs are shifted to continue the position index
        if not logs:
            return cls()
        offsets = np.cumsum([0] + [len(log) for log in logs[:-1]])
        return cls(
            positions=np.concatenate([log.positions + offset for log, offset in zip(logs, offsets)]),
            nll=np.concatenate([log.nll for log in logs]),
            correct=np.concatenate([log.correct for log in logs]),
            task_ids=np.concatenate([log.task_ids for log in logs]),
            task_positions=np.concatenate([log.task_positions for log in logs]),
            macs_total=sum(log.macs_total for log in logs),
            gradient_steps=sum(log.gradient_steps for log in logs),
        )

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        table = np.column_stack(
            [self.positions, self.nll, self.correct, self.task_ids, self.task_positions]
        )
        np.savetxt(path, table, fmt=_CSV_FORMATS, delimiter=",", header=",".join(CSV_COLUMNS), comments="")
        return path

    @classmethod
    def read_csv(cls, path: str | Path) -> "MetricsLog":
        path = Path(path)
        with path.open() as handle:
            header = handle.readline().strip()
        if header != ",".join(CSV_COLUMNS):
            raise FormatError(f"{path}: unexpected CSV header {header!r}", offset=0)
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
        if table.size == 0:
            return cls()
        return cls(
            positions=table[:, 0].astype(np.int64),
            nll=table[:, 1],
            correct=table[:, 2].astype(np.int64),
            task_ids=table[:, 3].astype(np.int64),
            task_positions=table[:, 4].astype(np.int64),
        )
