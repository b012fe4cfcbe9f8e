# app/model/__init__.py
#
# Model Module - pi-transformer and 2-token decoder with multi-query
# attention over a sliding-window KV cache.
#

from .config import Example, ModelConfig
from .params import BlockParams, ModelParams, init_params, named_parameters
from .kv_cache import KVCache, kv_cache_floats
from .attention import apply_rotary, build_attention_mask, mqa_attention, rotary_tables
from .blocks import block_forward, pi_block_forward
from .transformer import OnlineTransformer, TokenBatch, check_caches, embed_inputs, forward_chunk
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Example",
    "ModelConfig",
    "BlockParams",
    "ModelParams",
    "init_params",
    "named_parameters",
    "KVCache",
    "kv_cache_floats",
    "apply_rotary",
    "build_attention_mask",
    "mqa_attention",
    "rotary_tables",
    "block_forward",
    "pi_block_forward",
    "OnlineTransformer",
    "TokenBatch",
    "check_caches",
    "embed_inputs",
    "forward_chunk",
    "load_checkpoint",
    "save_checkpoint",
]
