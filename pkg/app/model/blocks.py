# app/model/blocks.py
#
# Parallel-residual transformer block: h + FFW(LN(h)) + Attn(LN(h)).
#
# The pi variant adds label projections to keys and values only; queries
# never see labels. The 2-token variant uses the same block without them.
#

import numpy as np

from app.errors import ConfigurationError
from app.model.attention import apply_rotary, mqa_attention
from app.model.kv_cache import KVCache
from app.model.params import BlockParams
from app.numerics import Tensor, concat, gelu, layer_norm, matmul

Rotary = tuple[np.ndarray, np.ndarray]


def _check_cache(params: BlockParams, cache: KVCache) -> None:
    key_size = params.w_key.shape[1]
    value_size = params.w_value.shape[1]
    if cache.key_size != key_size or cache.value_size != value_size:
        raise ConfigurationError(
            f"cache holds keys/values of width ({cache.key_size}, {cache.value_size}), "
            f"block produces ({key_size}, {value_size})"
        )


def block_forward(
    params: BlockParams,
    h: Tensor,
    cache: KVCache,
    mask: np.ndarray,
    y_priv: np.ndarray | None = None,
    rotary: Rotary | None = None,
) -> Tensor:
    #
    # One block over the tokens of the current chunk.
    #
    # Keys/values of the chunk are appended to the cache after attention,
    # which reads cached entries followed by the chunk's own entries.
    #
    # Args:
    #     params: Block weights
    #     h: Residual stream [t, D]
    #     cache: This block's KV cache (mutated)
    #     mask: Boolean [t, cache.size + t]
    #     y_priv: One-hot labels [t, K] for the privileged key/value path
    #     rotary: cos/sin tables [t, dk] for the chunk positions
    #
    _check_cache(params, cache)
    steps = h.shape[0]
    heads = params.w_query.shape[1] // params.w_key.shape[1]

    normed = layer_norm(h, params.norm_scale, params.norm_offset)
    ffw = matmul(gelu(matmul(normed, params.w_up) + params.b_up), params.w_down) + params.b_down

    queries = matmul(normed, params.w_query).reshape(steps, heads, -1).transpose(1, 0, 2)
    keys = matmul(normed, params.w_key)
    values = matmul(normed, params.w_value)
    if y_priv is not None:
        if params.w_key_label is None or params.w_value_label is None:
            raise ConfigurationError("privileged labels given to a block without label projections")
        labels = Tensor(y_priv.astype(h.dtype, copy=False))
        keys = keys + matmul(labels, params.w_key_label)
        values = values + matmul(labels, params.w_value_label)
    if rotary is not None:
        cos, sin = rotary
        queries = apply_rotary(queries, cos, sin)
        keys = apply_rotary(keys, cos, sin)

    cached_keys, cached_values = cache.ordered()
    all_keys = concat([Tensor(cached_keys.astype(h.dtype, copy=False)), keys])
    all_values = concat([Tensor(cached_values.astype(h.dtype, copy=False)), values])
    attn = mqa_attention(queries, all_keys, all_values, mask, params.w_out)

    cache.append(keys.data, values.data)
    return h + ffw + attn


def pi_block_forward(
    params: BlockParams,
    h: Tensor,
    y_priv: np.ndarray,
    cache: KVCache,
    mask: np.ndarray,
    rotary: Rotary | None = None,
) -> Tensor:
    return block_forward(params, h, cache, mask, y_priv=y_priv, rotary=rotary)
