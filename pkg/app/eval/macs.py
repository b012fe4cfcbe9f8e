# app/eval/macs.py
#
# Analytic multiply-accumulate counts.
#
# Every term corresponds to one matmul of the forward pass, so the totals
# match the operation-level counter of app.numerics.count_macs exactly.
# Layer norms, softmax and elementwise work are not counted, nor is any
# feature extractor.
#

from app.errors import ConfigurationError
from app.model.config import ModelConfig

# Backward pass approximated as two forward passes
TRAINING_MULTIPLIER = 3


def linear_macs(tokens: int, d_in: int, d_out: int) -> int:
    return tokens * d_in * d_out


def macs_breakdown(config: ModelConfig, tokens: int, cache_tokens: int = 0) -> dict[str, int]:
    #
    # Forward MACs of one chunk split into embedding, blocks and head.
    #
    # Args:
    #     config: Model configuration
    #     tokens: Sequence tokens in the chunk (2 per example for two_token)
    #     cache_tokens: Cached keys attended in addition to the chunk
    #
    # Raises:
    #     ConfigurationError: Odd token count for the two_token variant or
    #         negative counts
    #
    if tokens < 0 or cache_tokens < 0:
        raise ConfigurationError(f"token counts must be >= 0, got tokens={tokens}, cache_tokens={cache_tokens}")
    per_example = config.tokens_per_example
    if tokens % per_example:
        raise ConfigurationError(f"two_token chunks hold an even number of tokens, got {tokens}")
    examples = tokens // per_example
    width, heads, dk, dv = config.width, config.num_query_heads, config.dk, config.dv
    classes = config.num_classes
    keys = cache_tokens + tokens

    embedding = 0
    if config.use_image:
        embedding += linear_macs(examples, config.feature_dim, width)
    if config.variant == "two_token":
        embedding += linear_macs(examples, classes, width)

    block = (
        linear_macs(tokens, width, heads * dk)
        + linear_macs(tokens, width, dk)
        + linear_macs(tokens, width, dv)
        + heads * tokens * keys * dk
        + heads * tokens * keys * dv
        + linear_macs(tokens, heads * dv, width)
        + linear_macs(tokens, width, config.ffw_width)
        + linear_macs(tokens, config.ffw_width, width)
    )
    if config.variant == "pi":
        block += linear_macs(tokens, classes, dk) + linear_macs(tokens, classes, dv)

    return {
        "embedding": embedding,
        "blocks": config.depth * block,
        "head": linear_macs(examples, width, classes),
    }


def macs_forward(config: ModelConfig, tokens: int, cache_tokens: int = 0) -> int:
    return sum(macs_breakdown(config, tokens, cache_tokens).values())


def macs_training_step(config: ModelConfig, examples: int, cache_tokens: int, update: bool = True) -> int:
    # Forward plus approximate backward for update steps, forward only otherwise
    forward = macs_forward(config, examples * config.tokens_per_example, cache_tokens)
    return forward * TRAINING_MULTIPLIER if update else forward
