# app/model/attention.py
#
# Attention masks, rotary position encoding and multi-query attention.
#

import math
from typing import Literal

import numpy as np

from app.errors import DimensionError
from app.numerics import Tensor, masked_softmax, matmul, rotate_half, transpose

ROTARY_BASE = 10000.0


def build_attention_mask(
    variant: Literal["pi", "two_token"],
    query_positions,
    key_positions,
    window: int,
) -> np.ndarray:
    #
    # Boolean mask [t, t'] over absolute token positions.
    #
    # pi:        t' <  t and t - t' <= window (zero diagonal)
    # two_token: t' <= t and t - t' <= window
    #
    lag = np.asarray(query_positions)[:, None] - np.asarray(key_positions)[None, :]
    causal = lag > 0 if variant == "pi" else lag >= 0
    return causal & (lag <= window)


def rotary_tables(positions, size: int, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    #
    # cos/sin tables [n, size] for absolute positions.
    #
    # Features are rotated in pairs (i, i + size//2); a trailing odd feature
    # is left untouched (cos 1, sin 0).
    #
    half = size // 2
    positions = np.asarray(positions, dtype=np.float64)
    inv_freq = ROTARY_BASE ** (-np.arange(half, dtype=np.float64) / max(half, 1))
    angles = positions[:, None] * inv_freq[None, :]
    spare = size - 2 * half
    cos = np.concatenate([np.cos(angles), np.cos(angles), np.ones((len(positions), spare))], axis=1)
    sin = np.concatenate([np.sin(angles), np.sin(angles), np.zeros((len(positions), spare))], axis=1)
    return cos.astype(dtype), sin.astype(dtype)


def apply_rotary(x: Tensor, cos: np.ndarray, sin: np.ndarray) -> Tensor:
    # x [..., t, d] rotated by position-dependent angles
    return x * cos + rotate_half(x) * sin


def mqa_attention(q_heads: Tensor, keys: Tensor, values: Tensor, mask, w_out: Tensor | None = None) -> Tensor:
    #
    # Multi-query attention: every query head reads the same keys and values.
    #
    # Args:
    #     q_heads: Queries [H, t, dk]
    #     keys: Shared keys [t', dk]
    #     values: Shared values [t', dv]
    #     mask: Boolean [t, t']; fully masked rows produce zero vectors
    #     w_out: Optional output projection [H * dv, D]
    #
    # Returns:
    #     [t, H * dv] concatenated head outputs, or [t, D] when w_out is given
    #
    # Raises:
    #     DimensionError: On inconsistent shapes
    #
    if q_heads.ndim != 3 or keys.ndim != 2 or values.ndim != 2:
        raise DimensionError(f"mqa_attention: q {q_heads.shape}, k {keys.shape}, v {values.shape}")
    heads, steps, key_size = q_heads.shape
    if keys.shape[1] != key_size or keys.shape[0] != values.shape[0]:
        raise DimensionError(f"mqa_attention: q {q_heads.shape}, k {keys.shape}, v {values.shape}")
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (steps, keys.shape[0]):
        raise DimensionError(f"mqa_attention: mask {mask.shape}, expected ({steps}, {keys.shape[0]})")

    scores = matmul(q_heads, transpose(keys)) * (1.0 / math.sqrt(key_size))
    weights = masked_softmax(scores, mask)
    mixed = matmul(weights, values)  # [H, t, dv]
    out = transpose(mixed, (1, 0, 2)).reshape(steps, heads * values.shape[1])
    if w_out is not None:
        if w_out.shape[0] != heads * values.shape[1]:
            raise DimensionError(f"mqa_attention: output projection {w_out.shape} for {heads} heads of {values.shape[1]}")
        out = matmul(out, w_out)
    return out
