# tests/model/test_attention.py
# Unit tests for masks, rotary encoding and multi-query attention

import numpy as np
import pytest

from app.errors import DimensionError
from app.model import apply_rotary, build_attention_mask, mqa_attention, rotary_tables
from app.numerics import Tensor


# ============================================================================
# MASKS
# ============================================================================

def test_pi_first_token_attends_nothing():
    mask = build_attention_mask("pi", [0], [0], window=8)

    assert not mask.any()


def test_two_token_first_token_attends_itself():
    mask = build_attention_mask("two_token", [0], [0], window=8)

    np.testing.assert_array_equal(mask, [[True]])


def test_pi_window_limits_attention():
    positions = np.arange(6)
    mask = build_attention_mask("pi", [5], positions, window=2)

    np.testing.assert_array_equal(np.flatnonzero(mask[0]), [3, 4])


@pytest.mark.parametrize("window", [0, 1, 3, 100])
def test_pi_diagonal_is_always_masked(window):
    positions = np.arange(10)
    mask = build_attention_mask("pi", positions, positions, window)

    assert not np.diag(mask).any()
    assert not np.triu(mask).any()


def test_two_token_zero_window_is_self_only():
    positions = np.arange(4)

    np.testing.assert_array_equal(build_attention_mask("two_token", positions, positions, 0), np.eye(4, dtype=bool))


# ============================================================================
# ROTARY ENCODING
# ============================================================================

def test_rotary_scores_depend_only_on_relative_position():
    rng = np.random.default_rng(0)
    q = rng.standard_normal(6)
    k = rng.standard_normal(6)

    def score(query_position, key_position):
        cos, sin = rotary_tables([query_position, key_position], 6)
        rotated = apply_rotary(Tensor(np.stack([q, k])), cos, sin).data
        return rotated[0] @ rotated[1]

    assert score(7, 3) == pytest.approx(score(107, 103), rel=1e-9)
    assert score(7, 3) != pytest.approx(score(7, 4), rel=1e-6)


def test_rotary_preserves_norm_and_trailing_odd_feature():
    x = np.arange(1.0, 6.0)
    cos, sin = rotary_tables([11], 5)
    rotated = apply_rotary(Tensor(x[None, :]), cos, sin).data[0]

    assert np.linalg.norm(rotated) == pytest.approx(np.linalg.norm(x))
    assert rotated[4] == x[4]


# ============================================================================
# MULTI-QUERY ATTENTION
# ============================================================================

def test_single_unmasked_key_returns_its_value():
    q = Tensor(np.array([[[0.3, -0.2]]]))
    keys = Tensor(np.array([[1.0, 2.0], [5.0, 5.0]]))
    values = Tensor(np.array([[7.0, 8.0, 9.0], [0.0, 0.0, 0.0]]))
    out = mqa_attention(q, keys, values, np.array([[True, False]]))

    np.testing.assert_allclose(out.data, [[7.0, 8.0, 9.0]])


def test_all_keys_masked_gives_zero_vector():
    rng = np.random.default_rng(1)
    out = mqa_attention(
        Tensor(rng.standard_normal((2, 3, 4))),
        Tensor(rng.standard_normal((5, 4))),
        Tensor(rng.standard_normal((5, 2))),
        np.zeros((3, 5), dtype=bool),
    )

    np.testing.assert_array_equal(out.data, np.zeros((3, 4)))


def test_identical_heads_give_identical_outputs():
    rng = np.random.default_rng(2)
    head = rng.standard_normal((4, 3))
    keys = Tensor(rng.standard_normal((4, 3)))
    values = Tensor(rng.standard_normal((4, 2)))
    mask = np.tril(np.ones((4, 4), dtype=bool))

    out = mqa_attention(Tensor(np.stack([head, head])), keys, values, mask).data

    np.testing.assert_array_equal(out[:, :2], out[:, 2:])


def test_output_projection_is_applied():
    rng = np.random.default_rng(3)
    q = Tensor(rng.standard_normal((2, 3, 4)))
    keys = Tensor(rng.standard_normal((3, 4)))
    values = Tensor(rng.standard_normal((3, 5)))
    w_out = Tensor(rng.standard_normal((10, 6)))
    mask = np.ones((3, 3), dtype=bool)

    projected = mqa_attention(q, keys, values, mask, w_out).data
    concatenated = mqa_attention(q, keys, values, mask).data

    np.testing.assert_allclose(projected, concatenated @ w_out.data)


def test_mismatched_key_width_raises():
    with pytest.raises(DimensionError):
        mqa_attention(
            Tensor(np.ones((1, 2, 4))),
            Tensor(np.ones((3, 5))),
            Tensor(np.ones((3, 2))),
            np.ones((2, 3), dtype=bool),
        )
