# app/streams/state.py
#
# Per-stream sequence state.
#

from dataclasses import dataclass

import numpy as np

from app.data.readers import SequenceReader
from app.model.kv_cache import KVCache
from app.streams.replay import reset_probability
from app.streams.training_logger import TrainingLogger


@dataclass
class StreamState:
    #
    # Reader position, KV caches and random generator owned by one stream.
    #
    # Stream 0 reports metrics and never resets; streams 1..E-1 replay.
    #
    stream_id: int
    reader: SequenceReader
    caches: list[KVCache]
    rng: np.random.Generator

    @property
    def position(self) -> int:
        return self.reader.position

    @property
    def is_replay(self) -> bool:
        return self.stream_id > 0

    def reset(self) -> None:
        self.reader.reset()
        for cache in self.caches:
            cache.reset()


def stream_rng(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream_id])


def maybe_reset(stream: StreamState, lead_position: int, chunk_size: int) -> bool:
    #
    # Reset a replay stream with probability min(1, S/t).
    #
    # One uniform draw is consumed per call for replay streams, so the
    # stream's random sequence does not depend on the outcome. The
    # reporting stream is never reset.
    #
    # Returns:
    #     True if the stream was reset
    #
    if not stream.is_replay:
        return False
    if stream.rng.random() >= reset_probability(lead_position, chunk_size):
        return False
    TrainingLogger.stream_reset(stream.stream_id, lead_position, stream.position)
    stream.reset()
    return True
