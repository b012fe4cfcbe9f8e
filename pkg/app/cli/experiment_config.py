# app/cli/experiment_config.py
#
# Experiment files: TOML validated into pydantic models.
#
# Unknown keys are errors at every level. Cross-field checks name the
# offending field in their message (e.g. "data.sequence.ways").
#

import itertools
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.data.base_dataset import BlobDatasetSpec
from app.data.split_sequence import SequenceSpec
from app.errors import ConfigurationError
from app.model.config import ModelConfig
from app.streams.config import TrainerConfig

DEFAULT_OUTPUT_DIR = "runs"

# Axes a sweep grid may vary
GRID_AXES = {
    "model.width",
    "model.depth",
    "model.window",
    "trainer.num_streams",
    "trainer.learning_rate",
    "trainer.alpha0",
    "trainer.weight_decay",
}


class DataConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    feature_file: Path | None = None
    blobs: BlobDatasetSpec | None = None
    sequence: SequenceSpec | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "DataConfig":
        synthetic = self.blobs is not None or self.sequence is not None
        if self.feature_file is not None and synthetic:
            raise ValueError("give either feature_file or [data.blobs] + [data.sequence], not both")
        if self.feature_file is None and (self.blobs is None or self.sequence is None):
            raise ValueError("needs feature_file, or both [data.blobs] and [data.sequence]")
        return self


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    model: ModelConfig
    trainer: TrainerConfig
    data: DataConfig
    output_dir: Path | None = None
    data_seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    ablation: Literal["no_image", "no_attention"] | None = None
    gradient_stop: list[int] | None = None

    @model_validator(mode="after")
    def _cross_checks(self) -> "ExperimentConfig":
        blobs, sequence = self.data.blobs, self.data.sequence
        if blobs is not None and sequence is not None:
            if sequence.ways > blobs.num_classes:
                raise ValueError(
                    f"data.sequence.ways={sequence.ways} exceeds data.blobs.num_classes={blobs.num_classes}"
                )
            if self.model.num_classes < sequence.ways:
                raise ValueError(
                    f"model.num_classes={self.model.num_classes} is smaller than data.sequence.ways={sequence.ways}"
                )
            if self.model.use_image and self.model.feature_dim != blobs.feature_dim:
                raise ValueError(
                    f"model.feature_dim={self.model.feature_dim} differs from data.blobs.feature_dim={blobs.feature_dim}"
                )
            if self.trainer.total_examples > sequence.length:
                raise ValueError(
                    f"trainer.total_examples={self.trainer.total_examples} exceeds the "
                    f"{sequence.length} examples of data.sequence"
                )
        if self.gradient_stop is not None and any(position < 0 for position in self.gradient_stop):
            raise ValueError("gradient_stop positions must be >= 0")
        return self

    def resolved_output_dir(self, override: str | Path | None = None) -> Path:
        # --output-dir, then the config file, then OCL_OUTPUT_DIR
        if override is not None:
            return Path(override)
        if self.output_dir is not None:
            return self.output_dir
        return Path(os.getenv("OCL_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))

    def with_overrides(self, data_seed: int | None = None, model_seed: int | None = None) -> "ExperimentConfig":
        update: dict[str, Any] = {}
        if data_seed is not None:
            update["data_seeds"] = [data_seed]
        if model_seed is not None:
            update["trainer"] = self.trainer.model_copy(update={"seed": model_seed})
        return self.model_copy(update=update)


def _read_toml(path: str | Path) -> dict:
    try:
        with Path(path).open("rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    #
    # Read and validate an experiment file.
    #
    # A relative data.feature_file is resolved against the file's directory.
    #
    # Raises:
    #     ConfigurationError: Malformed TOML
    #     pydantic.ValidationError: Schema or cross-field violations
    #
    raw = _read_toml(path)
    data = raw.get("data")
    if isinstance(data, dict) and isinstance(data.get("feature_file"), str):
        feature_file = Path(data["feature_file"])
        if not feature_file.is_absolute():
            data["feature_file"] = str(Path(path).parent / feature_file)
    return ExperimentConfig.model_validate(raw)


def load_grid(path: str | Path) -> dict[str, list]:
    #
    # Sweep grid: [model] / [trainer] tables mapping an axis to its values.
    #
    # Raises:
    #     ConfigurationError: Unknown axis or a non-list / empty value list
    #
    raw = _read_toml(path)
    grid: dict[str, list] = {}
    for section, table in raw.items():
        if not isinstance(table, dict):
            raise ConfigurationError(f"grid: top-level key {section!r} must be a table")
        for key, values in table.items():
            axis = f"{section}.{key}"
            if axis not in GRID_AXES:
                raise ConfigurationError(f"grid: unsupported axis {axis!r} (allowed: {', '.join(sorted(GRID_AXES))})")
            if not isinstance(values, list) or not values:
                raise ConfigurationError(f"grid: {axis} needs a non-empty list of values")
            grid[axis] = values
    if not grid:
        raise ConfigurationError("grid: no axes given")
    return grid


def expand_grid(grid: dict[str, list]) -> list[dict[str, Any]]:
    axes = sorted(grid)
    return [dict(zip(axes, values)) for values in itertools.product(*(grid[axis] for axis in axes))]


def apply_settings(config: ExperimentConfig, settings: dict[str, Any]) -> ExperimentConfig:
    # Re-validated copy with dotted settings applied
    raw = config.model_dump()
    for axis, value in settings.items():
        section, key = axis.split(".", 1)
        raw[section][key] = value
    return ExperimentConfig.model_validate(raw)
