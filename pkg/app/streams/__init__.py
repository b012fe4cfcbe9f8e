# app/streams/__init__.py
#
# Streams Module - replay-streams online training.
#

from .config import TrainerConfig
from .replay import replay_chunk_length, replay_total_variation, reset_probability, simulate_replay_positions
from .state import StreamState, maybe_reset, stream_rng
from .trainer import StepResult, create_optimizer, gradient_step, train_sequence
from .training_logger import TrainingLogger

__all__ = [
    "TrainerConfig",
    "replay_chunk_length",
    "replay_total_variation",
    "reset_probability",
    "simulate_replay_positions",
    "StreamState",
    "maybe_reset",
    "stream_rng",
    "StepResult",
    "create_optimizer",
    "gradient_step",
    "train_sequence",
    "TrainingLogger",
]
