# app/data/base_dataset.py
#
# Labelled feature pools standing in for a frozen feature extractor's
# outputs.
#

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaseDataset:
    #
    # pools[c] holds the feature vectors [n_c, F] of base class c.
    #
    pools: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.pools:
            raise ConfigurationError("BaseDataset needs at least one class")
        widths = {pool.shape[1] for pool in self.pools}
        if len(widths) != 1:
            raise ConfigurationError(f"class pools disagree on feature width: {sorted(widths)}")
        for index, pool in enumerate(self.pools):
            if len(pool) == 0:
                raise ConfigurationError(f"class {index} has an empty example pool")
            if not np.all(np.isfinite(pool)):
                raise ConfigurationError(f"class {index} holds non-finite features")

    @property
    def num_classes(self) -> int:
        return len(self.pools)

    @property
    def feature_dim(self) -> int:
        return self.pools[0].shape[1]

    def class_means(self) -> np.ndarray:
        return np.stack([pool.mean(axis=0) for pool in self.pools])


class BlobDatasetSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_classes: int = Field(47, ge=1)
    feature_dim: int = Field(32, ge=1)
    cluster_spread: float = Field(0.3, ge=0.0)
    examples_per_class: int = Field(200, ge=1)


def gaussian_blob_dataset(
    num_classes: int,
    feature_dim: int,
    cluster_spread: float,
    seed: int,
    examples_per_class: int = 200,
) -> BaseDataset:
    #
    # One Gaussian cluster per class: mean ~ N(0, I), example = mean +
    # spread * N(0, I). Deterministic given seed.
    #
    if num_classes < 1 or feature_dim < 1 or examples_per_class < 1:
        raise ConfigurationError(
            f"gaussian_blob_dataset needs positive sizes, got classes={num_classes}, "
            f"F={feature_dim}, per_class={examples_per_class}"
        )
    rng = np.random.default_rng(seed)
    means = rng.standard_normal((num_classes, feature_dim))
    noise = rng.standard_normal((num_classes, examples_per_class, feature_dim))
    pools = means[:, None, :] + cluster_spread * noise
    logger.debug("gaussian blobs: %d classes, F=%d, spread=%s, seed=%d", num_classes, feature_dim, cluster_spread, seed)
    return BaseDataset(pools=tuple(pools.astype(np.float32)))


def blob_dataset_from_spec(spec: BlobDatasetSpec, seed: int) -> BaseDataset:
    return gaussian_blob_dataset(
        spec.num_classes, spec.feature_dim, spec.cluster_spread, seed, examples_per_class=spec.examples_per_class
    )
