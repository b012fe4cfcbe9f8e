# app/streams/trainer.py
#
# Replay-streams online trainer.
#
# Every turn, stream 0 predicts the next S examples, records its
# prequential metrics and takes one gradient step on them. Replay streams
# 1..E-1 then each take one gradient step on a chunk of already-seen data,
# in index order, after a stochastic reset. All steps share one AdamW
# state.
#

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from app.data.readers import DataSource
from app.errors import DataExhaustedError, NonFiniteError
from app.eval.gradient_stop import GradientStopHook
from app.eval.macs import macs_training_step
from app.eval.metrics_log import MetricsLog
from app.model.checkpoint import save_checkpoint
from app.model.config import Example
from app.model.transformer import OnlineTransformer
from app.numerics import AdamWState, adamw_step, cross_entropy
from app.streams.config import TrainerConfig
from app.streams.replay import replay_chunk_length
from app.streams.state import StreamState, maybe_reset, stream_rng
from app.streams.training_logger import TrainingLogger, log_every_turns


@dataclass
class StepResult:
    mean_nll: float
    nll: np.ndarray  # [n]
    correct: np.ndarray  # [n] 0/1, argmax with lowest-index ties
    macs: int
    updated: bool


def create_optimizer(model: OnlineTransformer, config: TrainerConfig) -> AdamWState:
    return AdamWState.create(
        model.parameters(),
        learning_rate=config.resolved_learning_rate(model.config.width),
        weight_decay=config.weight_decay,
        beta1=config.beta1,
        beta2=config.beta2,
        epsilon=config.epsilon,
    )


def gradient_step(
    model: OnlineTransformer,
    opt_state: AdamWState,
    stream: StreamState,
    chunk: Sequence[Example],
    update: bool = True,
) -> StepResult:
    #
    # Forward the chunk through the stream's caches, score it, and apply one
    # AdamW update on the mean NLL (skipped when update is False).
    #
    # The stream's reader must already be past the chunk; its position is
    # used in error messages.
    #
    # Raises:
    #     NonFiniteError: Non-finite loss or gradient
    #
    params = model.parameters()
    for param in params:
        param.zero_grad()
    cache_tokens = stream.caches[0].size
    chunk_start = stream.position - len(chunk)

    logits = model.forward(chunk, stream.caches)
    labels = np.array([example.label for example in chunk], dtype=np.int64)
    nll = cross_entropy(logits, labels)
    loss = nll.mean()
    if not np.isfinite(loss.item()):
        raise NonFiniteError("loss", step=opt_state.step_count, stream_id=stream.stream_id, position=chunk_start)

    if update:
        loss.backward()
        grads = [param.grad if param.grad is not None else np.zeros_like(param.data) for param in params]
        try:
            adamw_step(params, grads, opt_state)
        except NonFiniteError:
            raise NonFiniteError(
                "gradient", step=opt_state.step_count, stream_id=stream.stream_id, position=chunk_start
            ) from None

    return StepResult(
        mean_nll=loss.item(),
        nll=nll.data.astype(np.float64),
        correct=(np.argmax(logits.data, axis=-1) == labels).astype(np.int64),
        macs=macs_training_step(model.config, len(chunk), cache_tokens, update=update),
        updated=update,
    )


def train_sequence(
    model: OnlineTransformer,
    source: DataSource,
    config: TrainerConfig,
    hook: GradientStopHook | None = None,
    checkpoint_dir: str | Path | None = None,
) -> MetricsLog:
    #
    # Run the replay-streams protocol over the first T examples of source.
    #
    # Args:
    #     model: Model trained in place
    #     source: Deterministic data source; each stream reads its own cursor
    #     config: Trainer settings
    #     hook: Optional gradient stop; once it blocks an update, replay
    #         streams are skipped and stream 0 runs forward only
    #     checkpoint_dir: Where periodic checkpoints go (if enabled)
    #
    # Returns:
    #     Stream-0 metrics for positions 0..T-1
    #
    # Raises:
    #     DataExhaustedError: The source holds fewer than T examples
    #     NonFiniteError: Training diverged
    #
    total, chunk_size = config.total_examples, config.chunk_size
    if len(source) < total:
        raise DataExhaustedError(f"data source holds {len(source)} examples, trainer needs {total}")

    optimizer = create_optimizer(model, config)
    streams = [
        StreamState(stream_id, source.reader(), model.new_caches(), stream_rng(config.seed, stream_id))
        for stream_id in range(config.num_streams)
    ]
    lead = streams[0]
    TrainingLogger.sequence_started(total, chunk_size, config.num_streams, optimizer.learning_rate)

    nll_parts: list[np.ndarray] = []
    correct_parts: list[np.ndarray] = []
    task_ids: list[int] = []
    task_positions: list[int] = []
    macs_total = 0
    gradient_steps = 0
    stopped = False
    progress_every = log_every_turns()
    running_correct = 0
    running_nll = 0.0

    try:
        for turn in range(config.num_turns):
            start = lead.position
            chunk = lead.reader.read(min(chunk_size, total - start))
            lead_end = lead.position
            update = hook is None or hook.allows_update(lead_end)
            if not update and not stopped:
                stopped = True
                TrainingLogger.gradients_stopped(hook.stop_position)

            result = gradient_step(model, optimizer, lead, chunk, update=update)
            nll_parts.append(result.nll)
            correct_parts.append(result.correct)
            task_ids.extend(example.task_id for example in chunk)
            task_positions.extend(example.task_position for example in chunk)
            macs_total += result.macs
            gradient_steps += int(update)
            running_correct += int(result.correct.sum())
            running_nll += float(result.nll.sum())

            if update:
                for stream in streams[1:]:
                    maybe_reset(stream, start, chunk_size)
                    length = replay_chunk_length(stream.position, lead_end, chunk_size)
                    if length == 0:
                        stream.reset()
                        length = min(chunk_size, lead_end)
                    replay = gradient_step(model, optimizer, stream, stream.reader.read(length))
                    macs_total += replay.macs
                    gradient_steps += 1

            if (turn + 1) % progress_every == 0:
                TrainingLogger.turn_progress(
                    turn + 1, config.num_turns, lead_end, running_correct / lead_end, running_nll
                )
            if checkpoint_dir is not None and config.checkpoint_every and (turn + 1) % config.checkpoint_every == 0:
                path = save_checkpoint(Path(checkpoint_dir) / f"turn_{turn + 1:06d}.oclm", model)
                TrainingLogger.checkpoint_written(path)
    except NonFiniteError as exc:
        TrainingLogger.non_finite(exc)
        raise

    log = MetricsLog(
        positions=np.arange(total),
        nll=np.concatenate(nll_parts),
        correct=np.concatenate(correct_parts),
        task_ids=np.asarray(task_ids),
        task_positions=np.asarray(task_positions),
        macs_total=macs_total,
        gradient_steps=gradient_steps,
    )
    TrainingLogger.sequence_finished(gradient_steps, macs_total, running_correct / total, running_nll)
    return log
