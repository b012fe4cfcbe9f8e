# app/numerics/functional.py
#
# Fused differentiable operations with hand-written backward passes:
# layer normalisation, masked softmax, cross-entropy, GELU and the rotary
# helper. Each one computes its forward in a single numpy expression chain
# and closes over the intermediates its gradient needs.
#

import math

import numpy as np

from app.errors import DimensionError
from app.numerics.tensor import Tensor, _result

# LayerNorm epsilon used throughout the model
LAYER_NORM_EPS = 1e-6

_GELU_C = math.sqrt(2.0 / math.pi)
_GELU_A = 0.044715


def layer_norm(x: Tensor, scale: Tensor, offset: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    #
    # Normalise every vector along the last axis to zero mean and unit
    # variance, then apply the affine scale and offset.
    #
    # Raises:
    #     DimensionError: If scale/offset do not match the last extent
    #
    width = x.shape[-1]
    if scale.shape != (width,) or offset.shape != (width,):
        raise DimensionError(
            f"layer_norm: input {x.shape} needs scale/offset of shape ({width},), "
            f"got {scale.shape} and {offset.shape}"
        )

    centered = x.data - x.data.mean(axis=-1, keepdims=True)
    variance = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(variance + eps)
    normed = centered * inv_std
    out = normed * scale.data + offset.data

    def backward(grad):
        grad_x = grad_scale = grad_offset = None
        if x.requires_grad:
            d_normed = grad * scale.data
            grad_x = inv_std * (
                d_normed
                - d_normed.mean(axis=-1, keepdims=True)
                - normed * (d_normed * normed).mean(axis=-1, keepdims=True)
            )
        if scale.requires_grad:
            grad_scale = (grad * normed).reshape(-1, width).sum(axis=0)
        if offset.requires_grad:
            grad_offset = grad.reshape(-1, width).sum(axis=0)
        return grad_x, grad_scale, grad_offset

    return _result(out, (x, scale, offset), backward, "layer_norm")


def masked_softmax(logits: Tensor, mask) -> Tensor:
    #
    # Softmax over the last axis restricted to entries where mask is 1.
    #
    # Masked entries come out as exactly 0. A row whose entries are all
    # masked comes out as all zeros instead of NaN. The mask may cover the
    # last two axes only and is then shared by all leading (head) axes.
    #
    # Args:
    #     logits: Tensor [..., t, t']
    #     mask: 0/1 array of shape [t, t'] or logits.shape
    #
    mask = np.asarray(mask.data if isinstance(mask, Tensor) else mask).astype(bool)
    if mask.shape != logits.shape and mask.shape != logits.shape[-2:]:
        raise DimensionError(f"masked_softmax: mask {mask.shape} does not match logits {logits.shape}")

    masked = np.where(mask, logits.data, -np.inf)
    row_max = masked.max(axis=-1, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)
    exps = np.exp(masked - row_max)
    totals = exps.sum(axis=-1, keepdims=True)
    probs = np.divide(exps, totals, out=np.zeros_like(exps), where=totals > 0)

    def backward(grad):
        return (probs * (grad - (grad * probs).sum(axis=-1, keepdims=True)),)

    return _result(probs, (logits,), backward, "masked_softmax")


def softmax(logits: Tensor) -> Tensor:
    return masked_softmax(logits, np.ones(logits.shape, dtype=bool))


def cross_entropy(logits: Tensor, labels) -> Tensor:
    #
    # Negative log-likelihood -log softmax(logits)[label].
    #
    # Args:
    #     logits: Tensor [K] with an int label, or Tensor [n, K] with n labels
    #     labels: int or integer array
    #
    # Returns:
    #     Scalar tensor for a single example, tensor [n] for a batch
    #
    # Raises:
    #     IndexError: If a label is outside [0, K)
    #
    labels = np.asarray(labels, dtype=np.int64)
    num_classes = logits.shape[-1]
    if labels.shape != logits.shape[:-1]:
        raise DimensionError(f"cross_entropy: labels {labels.shape} do not match logits {logits.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise IndexError(f"cross_entropy: label out of range [0, {num_classes}): {labels.tolist()}")

    shifted = logits.data - logits.data.max(axis=-1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    picked = np.take_along_axis(log_probs, labels[..., None], axis=-1)[..., 0]

    def backward(grad):
        probs = np.exp(log_probs)
        np.put_along_axis(probs, labels[..., None], np.take_along_axis(probs, labels[..., None], axis=-1) - 1.0, axis=-1)
        return (probs * np.asarray(grad)[..., None],)

    return _result(-picked, (logits,), backward, "cross_entropy")


def gelu(x: Tensor) -> Tensor:
    # tanh approximation of GELU
    inner = _GELU_C * (x.data + _GELU_A * x.data**3)
    tanh = np.tanh(inner)
    out = 0.5 * x.data * (1.0 + tanh)

    def backward(grad):
        d_inner = _GELU_C * (1.0 + 3.0 * _GELU_A * x.data**2)
        return (grad * (0.5 * (1.0 + tanh) + 0.5 * x.data * (1.0 - tanh * tanh) * d_inner),)

    return _result(out, (x,), backward, "gelu")


def rotate_half(x: Tensor) -> Tensor:
    #
    # Pairwise rotation helper for rotary position encoding.
    #
    # The first 2*(d//2) features are split into halves (a, b) and mapped to
    # (-b, a); a trailing odd feature maps to 0.
    #
    half = x.shape[-1] // 2
    out = np.zeros_like(x.data)
    out[..., :half] = -x.data[..., half : 2 * half]
    out[..., half : 2 * half] = x.data[..., :half]

    def backward(grad):
        grad_x = np.zeros_like(grad)
        grad_x[..., :half] = grad[..., half : 2 * half]
        grad_x[..., half : 2 * half] = -grad[..., :half]
        return (grad_x,)

    return _result(out, (x,), backward, "rotate_half")


def one_hot(labels, num_classes: int, dtype=np.float64) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    encoded = np.zeros(labels.shape + (num_classes,), dtype=dtype)
    np.put_along_axis(encoded, labels[..., None], 1.0, axis=-1)
    return encoded


__all__ = [
    "LAYER_NORM_EPS",
    "cross_entropy",
    "gelu",
    "layer_norm",
    "masked_softmax",
    "one_hot",
    "rotate_half",
    "softmax",
]
