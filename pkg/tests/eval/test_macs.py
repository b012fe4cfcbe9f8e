# tests/eval/test_macs.py
# Unit tests for analytic MAC accounting

import pytest

from app.errors import ConfigurationError
from app.eval import TRAINING_MULTIPLIER, linear_macs, macs_breakdown, macs_forward, macs_training_step
from app.model import ModelConfig


@pytest.fixture
def config():
    return ModelConfig(width=16, depth=2, num_query_heads=2, key_size=8, window=32, num_classes=5, feature_dim=4)


def test_single_linear_layer():
    assert linear_macs(10, 4, 3) == 120


def test_doubling_depth_doubles_block_term(config):
    shallow = macs_breakdown(config, 10, 20)
    deep = macs_breakdown(config.model_copy(update={"depth": 4}), 10, 20)

    assert deep["blocks"] == 2 * shallow["blocks"]
    assert deep["embedding"] == shallow["embedding"]
    assert deep["head"] == shallow["head"]


def test_linear_in_tokens_with_saturated_window(config):
    # total attended keys held at the window size, as in steady state
    per_token = macs_forward(config, 1, config.window - 1)
    for tokens in (2, 8, 32):
        assert macs_forward(config, tokens, config.window - tokens) == tokens * per_token


def test_training_multiplier(config):
    forward = macs_forward(config, 10, 32)

    assert macs_training_step(config, 10, 32) == TRAINING_MULTIPLIER * forward
    assert macs_training_step(config, 10, 32, update=False) == forward


def test_two_token_counts_two_tokens_per_example(config):
    two_token = config.model_copy(update={"variant": "two_token"})

    assert macs_training_step(two_token, 5, 0, update=False) == macs_forward(two_token, 10, 0)


def test_two_token_rejects_odd_token_counts(config):
    with pytest.raises(ConfigurationError):
        macs_forward(config.model_copy(update={"variant": "two_token"}), 3)


def test_negative_counts_are_rejected(config):
    with pytest.raises(ConfigurationError):
        macs_forward(config, -1)
