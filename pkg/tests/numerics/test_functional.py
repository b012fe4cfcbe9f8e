# tests/numerics/test_functional.py
# Unit tests for fused differentiable operations

import math

import numpy as np
import pytest

from app.errors import DimensionError
from app.numerics import (
    Tensor,
    cross_entropy,
    gelu,
    grad_check,
    layer_norm,
    masked_softmax,
    one_hot,
    rotate_half,
    softmax,
)


# ============================================================================
# FORWARD VALUES
# ============================================================================

def test_layer_norm_output_is_standardised():
    x = Tensor(np.array([[1.0, 2.0, 3.0, 4.0], [10.0, 0.0, -10.0, 5.0]]))
    out = layer_norm(x, Tensor(np.ones(4)), Tensor(np.zeros(4))).data

    np.testing.assert_allclose(out.mean(axis=-1), 0.0, atol=1e-12)
    np.testing.assert_allclose(out.var(axis=-1), 1.0, atol=1e-5)


def test_layer_norm_rejects_wrong_scale_shape():
    with pytest.raises(DimensionError):
        layer_norm(Tensor(np.ones((2, 4))), Tensor(np.ones(3)), Tensor(np.zeros(4)))


def test_masked_softmax_zeroes_masked_entries_and_empty_rows():
    logits = Tensor(np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]))
    mask = np.array([[True, False, True], [False, False, False]])
    probs = masked_softmax(logits, mask).data

    assert probs[0, 1] == 0.0
    np.testing.assert_allclose(probs[0].sum(), 1.0)
    np.testing.assert_array_equal(probs[1], [0.0, 0.0, 0.0])


def test_masked_softmax_shares_mask_across_heads():
    logits = Tensor(np.zeros((3, 2, 2)))
    probs = masked_softmax(logits, np.array([[True, False], [True, True]])).data

    np.testing.assert_allclose(probs[:, 0], [[1.0, 0.0]] * 3)
    np.testing.assert_allclose(probs[:, 1], [[0.5, 0.5]] * 3)


def test_softmax_of_equal_logits_is_uniform():
    np.testing.assert_allclose(softmax(Tensor(np.zeros(4))).data, 0.25)


def test_cross_entropy_of_zero_logits_is_log_k():
    nll = cross_entropy(Tensor(np.zeros((3, 10))), np.array([0, 4, 9]))

    np.testing.assert_allclose(nll.data, math.log(10))


def test_cross_entropy_single_example_is_scalar():
    nll = cross_entropy(Tensor(np.array([0.0, 100.0])), 1)

    assert nll.shape == ()
    assert nll.item() == pytest.approx(0.0, abs=1e-12)


def test_cross_entropy_label_out_of_range():
    with pytest.raises(IndexError):
        cross_entropy(Tensor(np.zeros((2, 3))), np.array([0, 3]))


def test_gelu_matches_tanh_formula():
    x = np.linspace(-3, 3, 7)
    expected = 0.5 * x * (1 + np.tanh(math.sqrt(2 / math.pi) * (x + 0.044715 * x**3)))

    np.testing.assert_allclose(gelu(Tensor(x)).data, expected)


def test_rotate_half_leaves_odd_feature_at_zero():
    out = rotate_half(Tensor(np.array([1.0, 2.0, 3.0, 4.0, 5.0]))).data

    np.testing.assert_array_equal(out, [-3.0, -4.0, 1.0, 2.0, 0.0])


def test_one_hot_rows():
    np.testing.assert_array_equal(one_hot(np.array([2, 0]), 3), [[0, 0, 1], [1, 0, 0]])


# ============================================================================
# GRADIENT CHECKS (double precision, 10 seeds)
# ============================================================================

@pytest.mark.parametrize("seed", range(10))
def test_layer_norm_gradients(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.standard_normal((3, 5)), requires_grad=True)
    scale = Tensor(rng.standard_normal(5), requires_grad=True)
    offset = Tensor(rng.standard_normal(5), requires_grad=True)
    weights = rng.standard_normal((3, 5))

    assert grad_check(lambda: (layer_norm(x, scale, offset) * weights).sum(), [x, scale, offset]) < 1e-4


@pytest.mark.parametrize("seed", range(10))
def test_masked_softmax_gradients(seed):
    rng = np.random.default_rng(seed)
    logits = Tensor(rng.standard_normal((2, 4, 4)), requires_grad=True)
    mask = np.tril(np.ones((4, 4), dtype=bool), k=-1)  # first row fully masked
    weights = rng.standard_normal((2, 4, 4))

    assert grad_check(lambda: (masked_softmax(logits, mask) * weights).sum(), [logits]) < 1e-4


@pytest.mark.parametrize("seed", range(10))
def test_cross_entropy_gradients(seed):
    rng = np.random.default_rng(seed)
    logits = Tensor(rng.standard_normal((5, 4)), requires_grad=True)
    labels = rng.integers(0, 4, size=5)

    assert grad_check(lambda: cross_entropy(logits, labels).sum(), [logits]) < 1e-4


@pytest.mark.parametrize("seed", range(10))
def test_gelu_gradients(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(np.clip(2.0 * rng.standard_normal(8), -3.0, 3.0), requires_grad=True)
    weights = rng.standard_normal(8)

    assert grad_check(lambda: (gelu(x) * weights).sum(), [x]) < 1e-4


@pytest.mark.parametrize("seed", range(10))
def test_rotate_half_gradients(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.standard_normal((3, 5)), requires_grad=True)
    weights = rng.standard_normal((3, 5))

    assert grad_check(lambda: (rotate_half(x) * weights).sum() + (x * x * weights).sum(), [x]) < 1e-4
