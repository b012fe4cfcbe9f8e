# app/model/transformer.py
#
# Chunked causal forward pass for both model variants.
#
# Responsibilities:
# - Turn a chunk of examples into token vectors (embed_inputs)
# - Run all blocks over the chunk against the per-block KV caches
#   (forward_chunk)
# - Bundle configuration, parameters and cache creation (OnlineTransformer)
#

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.errors import DimensionError, StateError
from app.model.attention import build_attention_mask, rotary_tables
from app.model.blocks import block_forward
from app.model.config import Example, ModelConfig
from app.model.kv_cache import KVCache
from app.model.params import ModelParams, init_params
from app.numerics import Tensor, layer_norm, matmul, one_hot, stack, take


@dataclass
class TokenBatch:
    tokens: Tensor  # [n_tokens, D]
    privileged: np.ndarray | None  # one-hot labels [n_examples, K], pi only
    labels: np.ndarray  # [n_examples]

    @property
    def num_examples(self) -> int:
        return len(self.labels)


def embed_inputs(params: ModelParams, config: ModelConfig, chunk: Sequence[Example]) -> TokenBatch:
    #
    # Build the token sequence of a chunk.
    #
    # pi:        one token per example, projection of x_t, plus one-hot(y_t)
    #            carried alongside for the privileged path
    # two_token: [proj(x_1), emb(y_1), proj(x_2), emb(y_2), ...]
    #
    # Raises:
    #     DimensionError: Empty chunk or wrong feature width
    #     IndexError: Label outside [0, K)
    #
    if not chunk:
        raise DimensionError("embed_inputs: empty chunk")
    dtype = config.np_dtype
    labels = np.array([example.label for example in chunk], dtype=np.int64)
    if labels.min() < 0 or labels.max() >= config.num_classes:
        raise IndexError(f"embed_inputs: label out of range [0, {config.num_classes}): {labels.tolist()}")
    count = len(chunk)

    if config.use_image:
        features = np.stack([np.asarray(example.features, dtype=dtype) for example in chunk])
        if features.shape != (count, config.feature_dim):
            raise DimensionError(f"embed_inputs: features {features.shape}, expected ({count}, {config.feature_dim})")
        x_tokens = matmul(Tensor(features), params.input_proj) + params.input_bias
    else:
        x_tokens = take(params.input_token, np.zeros(count, dtype=np.int64))

    encoded = one_hot(labels, config.num_classes, dtype=dtype)
    if config.variant == "pi":
        return TokenBatch(tokens=x_tokens, privileged=encoded, labels=labels)

    y_tokens = matmul(Tensor(encoded), params.label_embedding)
    tokens = stack([x_tokens, y_tokens], axis=1).reshape(2 * count, config.width)
    return TokenBatch(tokens=tokens, privileged=None, labels=labels)


def check_caches(config: ModelConfig, caches: Sequence[KVCache]) -> int:
    #
    # Validate a cache set and return its shared total_tokens_seen.
    #
    # Raises:
    #     StateError: Wrong number of caches or diverging token counts
    #
    if len(caches) != config.depth:
        raise StateError(f"expected {config.depth} KV caches, got {len(caches)}")
    seen = {cache.total_tokens_seen for cache in caches}
    if len(seen) != 1:
        raise StateError(f"KV caches disagree on total_tokens_seen: {sorted(seen)}")
    return seen.pop()


def forward_chunk(
    params: ModelParams,
    config: ModelConfig,
    chunk: Sequence[Example],
    caches: Sequence[KVCache],
) -> Tensor:
    #
    # Logits [|chunk|, K] for every example of the chunk.
    #
    # The caches are advanced by the chunk's tokens. Logits at example i
    # condition only on earlier examples and on x_i itself.
    #
    start = check_caches(config, caches)
    batch = embed_inputs(params, config, chunk)
    steps = batch.tokens.shape[0]

    query_positions = start + np.arange(steps)
    key_positions = np.concatenate([caches[0].positions(), query_positions])
    mask = build_attention_mask(config.variant, query_positions, key_positions, config.window)
    rotary = rotary_tables(query_positions, config.dk, config.np_dtype) if config.rotary else None

    h = batch.tokens
    for block, cache in zip(params.blocks, caches):
        h = block_forward(block, h, cache, mask, y_priv=batch.privileged, rotary=rotary)

    h = layer_norm(h, params.final_norm_scale, params.final_norm_offset)
    if config.variant == "two_token":
        # predict y_t from the x_t token
        h = take(h, slice(0, None, 2))
    return matmul(h, params.head) + params.head_bias


class OnlineTransformer:
    #
    # A model instance: configuration, parameters and cache factory.
    #
    def __init__(self, config: ModelConfig, params: ModelParams | None = None, seed: int | None = None):
        self.config = config
        self.params = params if params is not None else init_params(config, seed)

    def parameters(self) -> list[Tensor]:
        return self.params.parameters()

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        return self.params.named_parameters()

    @property
    def num_parameters(self) -> int:
        return sum(tensor.data.size for tensor in self.parameters())

    def new_caches(self) -> list[KVCache]:
        config = self.config
        return [KVCache(config.window, config.dk, config.dv, dtype=config.np_dtype) for _ in range(config.depth)]

    def forward(self, chunk: Sequence[Example], caches: Sequence[KVCache]) -> Tensor:
        return forward_chunk(self.params, self.config, chunk, caches)

    def __repr__(self) -> str:
        return f"OnlineTransformer(variant={self.config.variant}, parameters={self.num_parameters})"
