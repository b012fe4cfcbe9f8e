# app/eval/ablations.py
#
# Ablations of the input pathways.
#
# no_image:     the x_t projection is replaced by a learned constant token,
#               so predictions rest on the label sequence alone
# no_attention: window C = 0, so no past example is attendable
#

from typing import Literal

from app.data.readers import DataSource
from app.eval.gradient_stop import GradientStopHook
from app.eval.summary import Summary, summarize
from app.model.config import ModelConfig
from app.model.transformer import OnlineTransformer
from app.streams.config import TrainerConfig
from app.streams.trainer import train_sequence

AblationKind = Literal["no_image", "no_attention"]


def apply_ablation(config: ModelConfig, kind: AblationKind | None) -> ModelConfig:
    if kind is None:
        return config
    if kind == "no_image":
        return config.model_copy(update={"use_image": False})
    if kind == "no_attention":
        return config.model_copy(update={"window": 0})
    raise ValueError(f"unknown ablation {kind!r}")


def run_ablation(
    kind: AblationKind,
    model_config: ModelConfig,
    trainer_config: TrainerConfig,
    source: DataSource,
    hook: GradientStopHook | None = None,
) -> Summary:
    model = OnlineTransformer(apply_ablation(model_config, kind), seed=trainer_config.seed)
    log = train_sequence(model, source, trainer_config, hook=hook)
    return summarize(log)
