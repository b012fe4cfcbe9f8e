# app/numerics/optim.py
#
# AdamW with decoupled weight decay and bias-corrected moments.
#

from dataclasses import dataclass, field

import numpy as np

from app.errors import DimensionError, NonFiniteError
from app.numerics.tensor import Tensor

# Optimizer constants (not given by the method description; standard values)
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPSILON = 1e-8


@dataclass
class AdamWState:
    #
    # Per-parameter moment accumulators plus hyper-parameters.
    #
    # Attributes:
    #     first_moment / second_moment: One array per parameter, same shapes
    #     step_count: Number of applied updates
    #
    learning_rate: float
    weight_decay: float = 0.0
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    epsilon: float = DEFAULT_EPSILON
    first_moment: list[np.ndarray] = field(default_factory=list)
    second_moment: list[np.ndarray] = field(default_factory=list)
    step_count: int = 0

    @classmethod
    def create(cls, params: list[Tensor], learning_rate: float, weight_decay: float = 0.0, **kwargs) -> "AdamWState":
        return cls(
            learning_rate=learning_rate,
            weight_decay=weight_decay,
            first_moment=[np.zeros_like(p.data) for p in params],
            second_moment=[np.zeros_like(p.data) for p in params],
            **kwargs,
        )


def adamw_step(params: list[Tensor], grads: list[np.ndarray], state: AdamWState) -> tuple[list[Tensor], AdamWState]:
    #
    # Apply one AdamW update in parameter order.
    #
    # Weight decay is applied first (p <- p * (1 - lr * wd)), then the
    # bias-corrected Adam step. Parameter arrays are replaced, not mutated.
    #
    # Raises:
    #     DimensionError: If params, grads and moments disagree in count or shape
    #     NonFiniteError: If any gradient holds NaN or inf
    #
    if not (len(params) == len(grads) == len(state.first_moment) == len(state.second_moment)):
        raise DimensionError(
            f"adamw_step: {len(params)} params, {len(grads)} grads, {len(state.first_moment)} moments"
        )
    for param, grad, moment in zip(params, grads, state.first_moment):
        if param.shape != grad.shape or param.shape != moment.shape:
            raise DimensionError(f"adamw_step: param {param.shape}, grad {grad.shape}, moment {moment.shape}")
        if not np.all(np.isfinite(grad)):
            raise NonFiniteError("gradient", step=state.step_count)

    step = state.step_count + 1
    lr = state.learning_rate
    correction1 = 1.0 - state.beta1**step
    correction2 = 1.0 - state.beta2**step

    for i, (param, grad) in enumerate(zip(params, grads)):
        m = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * grad
        v = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * grad * grad
        state.first_moment[i] = m
        state.second_moment[i] = v
        update = (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
        decayed = param.data * (1.0 - lr * state.weight_decay)
        param.data = (decayed - lr * update).astype(param.dtype, copy=False)

    state.step_count = step
    return params, state
