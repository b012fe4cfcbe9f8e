# app/model/config.py
#
# Model configuration and the example record fed to the model.
#

from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class ModelConfig(BaseModel):
    #
    # Architecture of an online transformer.
    #
    # variant "pi" reads one token per example and feeds labels through the
    # privileged key/value path; "two_token" interleaves [x_t, y_t] tokens.
    # window is counted in tokens, so a two_token model at the same window
    # sees half as many examples.
    #
    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: Literal["pi", "two_token"] = "pi"
    width: int = Field(64, ge=1)
    depth: int = Field(2, ge=1)
    num_query_heads: int = Field(1, ge=1)
    key_size: int = Field(32, ge=1)
    value_size: int | None = Field(None, ge=1)
    window: int = Field(128, ge=0)
    num_classes: int = Field(10, ge=1)
    feature_dim: int = Field(32, ge=1)
    ffw_multiplier: int = Field(4, ge=1)
    rotary: bool = True
    use_image: bool = True
    dtype: Literal["float32", "float64"] = "float32"
    init_seed: int = 0

    @property
    def dk(self) -> int:
        return self.key_size

    @property
    def dv(self) -> int:
        return self.value_size if self.value_size is not None else self.key_size

    @property
    def ffw_width(self) -> int:
        return self.ffw_multiplier * self.width

    @property
    def tokens_per_example(self) -> int:
        return 2 if self.variant == "two_token" else 1

    @property
    def np_dtype(self) -> np.dtype:
        return np.dtype(self.dtype)


@dataclass(frozen=True)
class Example:
    # One (x_t, y_t) pair plus its place in the piecewise-stationary sequence
    features: np.ndarray
    label: int
    task_id: int = 0
    task_position: int = 0
