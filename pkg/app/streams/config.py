# app/streams/config.py
#
# Trainer settings: replay stream count, chunk size, sequence length,
# AdamW hyperparameters and checkpoint cadence. Immutable once built.
#

from pydantic import BaseModel, ConfigDict, Field

from app.numerics.optim import DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON


class TrainerConfig(BaseModel):
    #
    # Replay-streams trainer settings.
    #
    # num_streams = 1 disables replay. learning_rate defaults to
    # alpha0 / width. checkpoint_every counts turns (0 disables).
    #
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_streams: int = Field(1, ge=1)
    chunk_size: int = Field(10, ge=1)
    alpha0: float = Field(3e-2, gt=0.0)
    learning_rate: float | None = Field(None, gt=0.0)
    weight_decay: float = Field(0.0, ge=0.0)
    seed: int = 0
    total_examples: int = Field(1000, ge=1)
    beta1: float = Field(DEFAULT_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(DEFAULT_BETA2, ge=0.0, lt=1.0)
    epsilon: float = Field(DEFAULT_EPSILON, gt=0.0)
    checkpoint_every: int = Field(0, ge=0)

    def resolved_learning_rate(self, width: int) -> float:
        return self.learning_rate if self.learning_rate is not None else self.alpha0 / width

    @property
    def num_turns(self) -> int:
        return -(-self.total_examples // self.chunk_size)
