# tests/streams/test_trainer.py
# Integration tests for the replay-streams trainer

import math

import numpy as np
import pytest

from app.data import ArraySource
from app.errors import DataExhaustedError, NonFiniteError
from app.eval import GradientStopHook, macs_training_step
from app.model import ModelConfig, OnlineTransformer
from app.streams import TrainerConfig, train_sequence


@pytest.fixture
def model_config():
    return ModelConfig(width=8, depth=1, key_size=4, window=16, num_classes=4, feature_dim=3, ffw_multiplier=2)


class RecordingSource(ArraySource):
    # Remembers every [start, stop) range a reader asks for
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.reads: list[tuple[int, int]] = []

    def examples(self, start, stop):
        self.reads.append((start, stop))
        return super().examples(start, stop)


# ============================================================================
# STEP ACCOUNTING
# ============================================================================

def test_single_stream_takes_one_step_per_turn(model_config, random_source):
    config = TrainerConfig(num_streams=1, chunk_size=10, total_examples=100)
    log = train_sequence(OnlineTransformer(model_config), random_source(100, 3, 4), config)

    assert log.gradient_steps == 10
    np.testing.assert_array_equal(log.positions, np.arange(100))
    log.validate(100)


def test_replay_streams_multiply_steps(model_config, random_source):
    config = TrainerConfig(num_streams=4, chunk_size=10, total_examples=1000)
    log = train_sequence(OnlineTransformer(model_config), random_source(1000, 3, 4), config)

    assert log.gradient_steps == 400
    assert len(log) == 1000


def test_partial_last_chunk(model_config, random_source):
    config = TrainerConfig(chunk_size=10, total_examples=35)
    log = train_sequence(OnlineTransformer(model_config), random_source(40, 3, 4), config)

    assert len(log) == 35
    assert log.gradient_steps == 4


def test_first_chunk_scores_log_k(model_config, random_source):
    config = TrainerConfig(chunk_size=10, total_examples=30)
    log = train_sequence(OnlineTransformer(model_config), random_source(30, 3, 4), config)

    np.testing.assert_allclose(log.nll[:10], math.log(4), atol=1e-6)


def test_macs_total_matches_analytic_schedule(model_config, random_source):
    config = TrainerConfig(chunk_size=10, total_examples=60)
    log = train_sequence(OnlineTransformer(model_config), random_source(60, 3, 4), config)

    expected = sum(
        macs_training_step(model_config, 10, min(start, model_config.window)) for start in range(0, 60, 10)
    )
    assert log.macs_total == expected


def test_too_short_source_is_rejected(model_config, random_source):
    with pytest.raises(DataExhaustedError):
        train_sequence(OnlineTransformer(model_config), random_source(50, 3, 4), TrainerConfig(total_examples=60))


# ============================================================================
# REPLAY BEHAVIOUR
# ============================================================================

def test_replay_never_reads_beyond_the_lead(model_config):
    rng = np.random.default_rng(0)
    source = RecordingSource(rng.standard_normal((200, 3)), rng.integers(0, 4, size=200), num_classes=4)
    config = TrainerConfig(num_streams=3, chunk_size=10, total_examples=200)
    train_sequence(OnlineTransformer(model_config), source, config)

    assert len(source.reads) == 20 * 3
    for turn in range(20):
        lead_start, lead_end = source.reads[3 * turn]
        assert (lead_start, lead_end) == (10 * turn, 10 * turn + 10)
        for start, stop in source.reads[3 * turn + 1 : 3 * turn + 3]:
            assert 0 <= start < stop <= lead_end


def test_training_is_deterministic(model_config, random_source):
    config = TrainerConfig(num_streams=2, chunk_size=5, total_examples=80, seed=3)
    first = train_sequence(OnlineTransformer(model_config, seed=1), random_source(80, 3, 4), config)
    second = train_sequence(OnlineTransformer(model_config, seed=1), random_source(80, 3, 4), config)

    np.testing.assert_array_equal(first.nll, second.nll)
    np.testing.assert_array_equal(first.correct, second.correct)


def test_constant_label_is_learned():
    config = ModelConfig(width=8, depth=1, key_size=4, window=8, num_classes=2, feature_dim=1, ffw_multiplier=2)
    source = ArraySource.from_labels(np.zeros(500, dtype=np.int64), num_classes=2)
    trainer = TrainerConfig(chunk_size=1, total_examples=500, learning_rate=1e-2)
    log = train_sequence(OnlineTransformer(config), source, trainer)

    assert log.correct[-100:].all()
    assert log.nll[-100:].mean() < log.nll[:10].mean()


def test_task_annotations_are_carried_into_the_log(model_config):
    source = ArraySource(
        np.zeros((20, 3)),
        np.zeros(20, dtype=np.int64),
        num_classes=4,
        task_ids=np.repeat([0, 1], 10),
        task_positions=np.tile(np.arange(10), 2),
    )
    log = train_sequence(OnlineTransformer(model_config), source, TrainerConfig(chunk_size=4, total_examples=20))

    np.testing.assert_array_equal(log.task_ids, np.repeat([0, 1], 10))
    np.testing.assert_array_equal(log.task_positions, np.tile(np.arange(10), 2))


# ============================================================================
# FAILURES, GRADIENT STOP, CHECKPOINTS
# ============================================================================

def test_infinite_features_abort_with_non_finite_error(model_config):
    features = np.zeros((30, 3))
    features[12] = np.inf
    source = ArraySource(features, np.zeros(30, dtype=np.int64), num_classes=4)

    with pytest.raises(NonFiniteError) as excinfo:
        train_sequence(OnlineTransformer(model_config), source, TrainerConfig(chunk_size=10, total_examples=30))
    assert excinfo.value.stream_id == 0
    assert excinfo.value.position == 10


def test_stop_at_zero_never_updates(model_config, random_source):
    config = TrainerConfig(num_streams=3, chunk_size=10, total_examples=50)
    log = train_sequence(OnlineTransformer(model_config), random_source(50, 3, 4), config, hook=GradientStopHook(0))

    assert log.gradient_steps == 0
    np.testing.assert_allclose(log.nll, math.log(4), atol=1e-6)
    assert log.macs_total == sum(
        macs_training_step(model_config, 10, min(start, model_config.window), update=False)
        for start in range(0, 50, 10)
    )


def test_stop_at_end_matches_unhooked_run(model_config, random_source):
    config = TrainerConfig(num_streams=2, chunk_size=10, total_examples=50)
    plain = train_sequence(OnlineTransformer(model_config), random_source(50, 3, 4), config)
    hooked = train_sequence(
        OnlineTransformer(model_config), random_source(50, 3, 4), config, hook=GradientStopHook(50)
    )

    np.testing.assert_array_equal(hooked.nll, plain.nll)
    assert hooked.gradient_steps == plain.gradient_steps


def test_stop_mid_sequence_freezes_later_chunks(model_config, random_source):
    config = TrainerConfig(num_streams=2, chunk_size=10, total_examples=60)
    log = train_sequence(OnlineTransformer(model_config), random_source(60, 3, 4), config, hook=GradientStopHook(30))

    # three updating turns of two streams each
    assert log.gradient_steps == 6


def test_periodic_checkpoints(model_config, random_source, temp_directory):
    config = TrainerConfig(chunk_size=10, total_examples=100, checkpoint_every=5)
    train_sequence(OnlineTransformer(model_config), random_source(100, 3, 4), config, checkpoint_dir=temp_directory)

    assert sorted(path.name for path in temp_directory.iterdir()) == ["turn_000005.oclm", "turn_000010.oclm"]
