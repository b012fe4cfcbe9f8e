# app/numerics/gradcheck.py
#
# Finite-difference gradient verification.
#
# Perturbs every parameter entry by +-step, evaluates the scalar loss
# twice and reports the worst relative error against the gradients
# produced by backward().
#

from typing import Callable

import numpy as np

from app.numerics.tensor import Tensor

FINITE_DIFFERENCE_STEP = 1e-5


def grad_check(f: Callable[[], Tensor], params: list[Tensor], step: float = FINITE_DIFFERENCE_STEP) -> float:
    #
    # Compare reverse-mode gradients with central differences.
    #
    # Args:
    #     f: Closure returning a scalar tensor computed from params
    #     params: Leaf tensors (float64 recommended) perturbed in place
    #     step: Central-difference step h
    #
    # Returns:
    #     max over elements of |a - n| / max(|a|, |n|, 1e-8)
    #
    for param in params:
        param.requires_grad = True
        param.zero_grad()
    f().backward()
    analytic = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]

    worst = 0.0
    for param, grad in zip(params, analytic):
        flat = param.data.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            upper = float(f().data)
            flat[i] = original - step
            lower = float(f().data)
            flat[i] = original
            numeric = (upper - lower) / (2.0 * step)
            exact = float(grad.reshape(-1)[i])
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), 1e-8)
            worst = max(worst, error)

    for param in params:
        param.zero_grad()
    return worst
