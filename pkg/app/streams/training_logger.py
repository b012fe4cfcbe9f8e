# app/streams/training_logger.py
#
# Training Logger - events of the replay-streams training loop.
#
# All messages carry the [TRAIN] prefix for easy filtering.
#

import logging
import os

logger = logging.getLogger("app.streams")

DEFAULT_LOG_EVERY_TURNS = 100


def log_every_turns() -> int:
    # Progress interval from OCL_LOG_EVERY_TURNS
    try:
        return max(1, int(os.getenv("OCL_LOG_EVERY_TURNS", DEFAULT_LOG_EVERY_TURNS)))
    except ValueError:
        return DEFAULT_LOG_EVERY_TURNS


class TrainingLogger:

    @staticmethod
    def sequence_started(total_examples: int, chunk_size: int, num_streams: int, learning_rate: float):
        logger.info(
            "[TRAIN] Sequence started: T=%d, S=%d, E=%d, lr=%.3g",
            total_examples,
            chunk_size,
            num_streams,
            learning_rate,
        )

    @staticmethod
    def turn_progress(turn: int, num_turns: int, position: int, accuracy: float, cumulative_nll: float):
        logger.info(
            "[TRAIN] Turn %d/%d: position=%d, avg accuracy=%.4f, cumulative NLL=%.2f",
            turn,
            num_turns,
            position,
            accuracy,
            cumulative_nll,
        )

    @staticmethod
    def stream_reset(stream_id: int, lead_position: int, replay_position: int):
        logger.debug("[TRAIN] Replay stream %d reset at lead position %d (was at %d)", stream_id, lead_position, replay_position)

    @staticmethod
    def gradients_stopped(position: int):
        logger.info("[TRAIN] Gradient updates stopped at position %d", position)

    @staticmethod
    def checkpoint_written(path):
        logger.info("[TRAIN] Checkpoint written: %s", path)

    @staticmethod
    def non_finite(error: Exception):
        logger.error("[TRAIN] Aborting: %s", error)

    @staticmethod
    def sequence_finished(gradient_steps: int, macs_total: int, accuracy: float, cumulative_nll: float):
        logger.info(
            "[TRAIN] Sequence finished: %d gradient steps, %d MACs, avg accuracy=%.4f, cumulative NLL=%.2f",
            gradient_steps,
            macs_total,
            accuracy,
            cumulative_nll,
        )
