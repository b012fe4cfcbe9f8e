# app/model/params.py
#
# Parameter containers and their initialisation.
#
# Declaration order (used by optimizers and checkpoints) is the order of
# named_parameters(): input path, label embedding, blocks in depth order,
# final norm, output head.
#

from dataclasses import dataclass

import numpy as np

from app.model.config import ModelConfig
from app.numerics import Tensor


@dataclass
class BlockParams:
    #
    # Weights of one transformer block.
    #
    # There is exactly one key and one value projection regardless of the
    # number of query heads. The label projections exist only for the pi
    # variant.
    #
    norm_scale: Tensor
    norm_offset: Tensor
    w_up: Tensor
    b_up: Tensor
    w_down: Tensor
    b_down: Tensor
    w_query: Tensor  # [D, H * dk]
    w_key: Tensor  # [D, dk]
    w_value: Tensor  # [D, dv]
    w_out: Tensor  # [H * dv, D]
    w_key_label: Tensor | None = None  # [K, dk]
    w_value_label: Tensor | None = None  # [K, dv]

    def named_parameters(self, prefix: str) -> list[tuple[str, Tensor]]:
        names = [
            "norm_scale",
            "norm_offset",
            "w_up",
            "b_up",
            "w_down",
            "b_down",
            "w_query",
            "w_key",
            "w_value",
            "w_out",
            "w_key_label",
            "w_value_label",
        ]
        return [(f"{prefix}.{name}", getattr(self, name)) for name in names if getattr(self, name) is not None]


@dataclass
class ModelParams:
    blocks: list[BlockParams]
    final_norm_scale: Tensor
    final_norm_offset: Tensor
    head: Tensor  # [D, K]
    head_bias: Tensor  # [K]
    input_proj: Tensor | None = None  # [F, D]
    input_bias: Tensor | None = None  # [D]
    input_token: Tensor | None = None  # [1, D], replaces the image when use_image is off
    label_embedding: Tensor | None = None  # [K, D], two_token only

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        named: list[tuple[str, Tensor]] = []
        for name in ("input_proj", "input_bias", "input_token", "label_embedding"):
            value = getattr(self, name)
            if value is not None:
                named.append((name, value))
        for index, block in enumerate(self.blocks):
            named.extend(block.named_parameters(f"blocks.{index}"))
        named.extend(
            [
                ("final_norm_scale", self.final_norm_scale),
                ("final_norm_offset", self.final_norm_offset),
                ("head", self.head),
                ("head_bias", self.head_bias),
            ]
        )
        return named

    def parameters(self) -> list[Tensor]:
        return [tensor for _, tensor in self.named_parameters()]


def named_parameters(params: ModelParams) -> list[tuple[str, Tensor]]:
    return params.named_parameters()


def init_params(config: ModelConfig, seed: int | None = None) -> ModelParams:
    #
    # Deterministic initialisation.
    #
    # Weight matrices are Gaussian with standard deviation 1/sqrt(fan_in);
    # biases and offsets start at 0, norm scales at 1. The output head and
    # its bias are zero so the first prediction is exactly uniform.
    #
    # Args:
    #     config: Model configuration
    #     seed: Overrides config.init_seed when given
    #
    rng = np.random.default_rng(config.init_seed if seed is None else seed)
    dtype = config.np_dtype
    width, dk, dv = config.width, config.dk, config.dv
    heads, classes = config.num_query_heads, config.num_classes

    def gaussian(fan_in: int, *shape: int) -> Tensor:
        values = rng.standard_normal(shape) / np.sqrt(fan_in)
        return Tensor(values.astype(dtype), requires_grad=True)

    def constant(value: float, *shape: int) -> Tensor:
        return Tensor(np.full(shape, value, dtype=dtype), requires_grad=True)

    params = ModelParams(
        blocks=[],
        final_norm_scale=constant(1.0, width),
        final_norm_offset=constant(0.0, width),
        head=constant(0.0, width, classes),
        head_bias=constant(0.0, classes),
    )
    if config.use_image:
        params.input_proj = gaussian(config.feature_dim, config.feature_dim, width)
        params.input_bias = constant(0.0, width)
    else:
        params.input_token = gaussian(1, 1, width)
    if config.variant == "two_token":
        params.label_embedding = gaussian(1, classes, width)

    for _ in range(config.depth):
        block = BlockParams(
            norm_scale=constant(1.0, width),
            norm_offset=constant(0.0, width),
            w_up=gaussian(width, width, config.ffw_width),
            b_up=constant(0.0, config.ffw_width),
            w_down=gaussian(config.ffw_width, config.ffw_width, width),
            b_down=constant(0.0, width),
            w_query=gaussian(width, width, heads * dk),
            w_key=gaussian(width, width, dk),
            w_value=gaussian(width, width, dv),
            w_out=gaussian(heads * dv, heads * dv, width),
        )
        if config.variant == "pi":
            block.w_key_label = gaussian(1, classes, dk)
            block.w_value_label = gaussian(1, classes, dv)
        params.blocks.append(block)
    return params
