# app/numerics/__init__.py
#
# Numerics Module - dense tensors, reverse-mode differentiation, AdamW.
#

from .tensor import Tensor, add, concat, matmul, mul, reshape, stack, sub, take, transpose
from .functional import LAYER_NORM_EPS, cross_entropy, gelu, layer_norm, masked_softmax, one_hot, rotate_half, softmax
from .optim import AdamWState, adamw_step
from .gradcheck import grad_check
from .mac_counter import MacCounter, count_macs

__all__ = [
    "Tensor",
    "add",
    "concat",
    "matmul",
    "mul",
    "reshape",
    "stack",
    "sub",
    "take",
    "transpose",
    "LAYER_NORM_EPS",
    "cross_entropy",
    "gelu",
    "layer_norm",
    "masked_softmax",
    "one_hot",
    "rotate_half",
    "softmax",
    "AdamWState",
    "adamw_step",
    "grad_check",
    "MacCounter",
    "count_macs",
]
