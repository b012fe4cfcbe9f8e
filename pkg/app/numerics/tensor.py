# app/numerics/tensor.py
#
# Dense tensor with reverse-mode differentiation.
#
# Responsibilities:
# - Hold a numpy array plus an optional gradient accumulator
# - Record the operations that produced each value (only when an input
#   requires a gradient)
# - Walk the recorded graph backwards and accumulate leaf gradients
#
# Values are never modified in place once produced. Gradients accumulate on
# leaves only; intermediate nodes hand their gradient to their parents and
# drop it.
#

from typing import Callable, Iterable, Sequence

import numpy as np

from app.errors import DimensionError
from app.numerics.mac_counter import record_backward, record_forward

# Backward closures receive the upstream gradient and return one gradient
# (or None) per parent, in parent order.
BackwardFn = Callable[[np.ndarray], tuple[np.ndarray | None, ...]]


class Tensor:
    #
    # Node of the computation graph.
    #
    # Args:
    #     data: Array-like values; integer input is promoted to float64
    #     requires_grad: Track gradients for this leaf
    #     dtype: Optional numpy dtype to cast to
    #
    __slots__ = ("data", "requires_grad", "grad", "op", "_parents", "_backward")

    # Make numpy defer to the reflected operators (ndarray + Tensor)
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        array = np.asarray(data, dtype=dtype)
        if array.dtype.kind != "f":
            array = array.astype(np.float64)
        self.data: np.ndarray = array
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.op = "leaf"
        self._parents: tuple["Tensor", ...] = ()
        self._backward: BackwardFn | None = None

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def values(self) -> np.ndarray:
        return self.data

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, op={self.op}{flag})"

    # ------------------------------------------------------------------
    # Gradients
    # ------------------------------------------------------------------

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def backward(self, grad: np.ndarray | None = None) -> None:
        #
        # Accumulate d(self)/d(leaf) into every leaf that requires a gradient.
        #
        # Args:
        #     grad: Upstream gradient; defaults to 1 for scalar outputs
        #
        # Raises:
        #     DimensionError: If grad is omitted for a non-scalar tensor
        #
        if not self.requires_grad:
            return
        if grad is None:
            if self.data.size != 1:
                raise DimensionError(f"backward() needs an explicit gradient for shape {self.shape}")
            grad = np.ones_like(self.data)

        pending: dict[int, np.ndarray] = {id(self): np.asarray(grad, dtype=self.dtype)}
        for node in reversed(_topological_order(self)):
            upstream = pending.pop(id(node), None)
            if upstream is None:
                continue
            if node._backward is None:
                node.grad = upstream.copy() if node.grad is None else node.grad + upstream
                continue
            for parent, parent_grad in zip(node._parents, node._backward(upstream)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = pending[key] + parent_grad if key in pending else parent_grad

    # ------------------------------------------------------------------
    # Operators
    # ------------------------------------------------------------------

    def __add__(self, other) -> "Tensor":
        return add(self, other)

    def __radd__(self, other) -> "Tensor":
        return add(other, self)

    def __sub__(self, other) -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other) -> "Tensor":
        return sub(other, self)

    def __mul__(self, other) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, scalar: float) -> "Tensor":
        return mul(self, 1.0 / scalar)

    def __neg__(self) -> "Tensor":
        return mul(self, -1.0)

    def __matmul__(self, other) -> "Tensor":
        return matmul(self, other)

    def __getitem__(self, index) -> "Tensor":
        return take(self, index)

    def sum(self, axis: int | None = None, keepdims: bool = False) -> "Tensor":
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | None = None, keepdims: bool = False) -> "Tensor":
        count = self.data.size if axis is None else self.shape[axis]
        return reduce_sum(self, axis=axis, keepdims=keepdims) / count

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes) -> "Tensor":
        return transpose(self, axes or None)


# ----------------------------------------------------------------------
# Graph helpers
# ----------------------------------------------------------------------

def _topological_order(root: Tensor) -> list[Tensor]:
    # Iterative post-order DFS over nodes that require gradients
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def _result(data: np.ndarray, parents: Sequence[Tensor], backward: BackwardFn, op: str) -> Tensor:
    out = Tensor(data)
    out.op = op
    if any(parent.requires_grad for parent in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def as_tensor(value, like: Tensor | None = None) -> Tensor:
    #
    # Wrap scalars and arrays as constant tensors.
    #
    # Args:
    #     value: Tensor, ndarray or scalar
    #     like: Tensor whose dtype constants should adopt
    #
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(np.asarray(value, dtype=dtype))


def _lift(a, b) -> tuple[Tensor, Tensor]:
    if isinstance(a, Tensor):
        return a, as_tensor(b, like=a)
    b = as_tensor(b)
    return as_tensor(a, like=b), b


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    # Sum a broadcast gradient back down to the operand's shape
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


# ----------------------------------------------------------------------
# Elementwise arithmetic
# ----------------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = _lift(a, b)
    _broadcast_shape(a, b, "add")

    def backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return _result(a.data + b.data, (a, b), backward, "add")


def sub(a, b) -> Tensor:
    a, b = _lift(a, b)
    _broadcast_shape(a, b, "sub")

    def backward(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return _result(a.data - b.data, (a, b), backward, "sub")


def mul(a, b) -> Tensor:
    a, b = _lift(a, b)
    _broadcast_shape(a, b, "mul")

    def backward(grad):
        grad_a = _unbroadcast(grad * b.data, a.shape) if a.requires_grad else None
        grad_b = _unbroadcast(grad * a.data, b.shape) if b.requires_grad else None
        return grad_a, grad_b

    return _result(a.data * b.data, (a, b), backward, "mul")


# ----------------------------------------------------------------------
# Linear algebra
# ----------------------------------------------------------------------

def matmul(a, b) -> Tensor:
    #
    # Matrix product a @ b with a of shape [..., m, k] and b of shape [k, n].
    #
    # Leading axes of a are treated as a batch sharing the same right-hand
    # matrix, which covers every projection and multi-query attention product
    # the model needs. MACs are reported to active counters.
    #
    # Raises:
    #     DimensionError: If b is not a matrix or the inner extents differ
    #
    a, b = _lift(a, b)
    if a.ndim < 2 or b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise DimensionError(f"matmul shape mismatch: {a.shape} @ {b.shape}")

    rows = int(np.prod(a.shape[:-1]))
    inner, cols = b.shape
    record_forward(rows * inner * cols)

    def backward(grad):
        grad_a = grad_b = None
        if a.requires_grad:
            grad_a = grad @ b.data.T
            record_backward(rows * inner * cols)
        if b.requires_grad:
            grad_b = a.data.reshape(rows, inner).T @ grad.reshape(rows, cols)
            record_backward(rows * inner * cols)
        return grad_a, grad_b

    return _result(a.data @ b.data, (a, b), backward, "matmul")


# ----------------------------------------------------------------------
# Shape manipulation
# ----------------------------------------------------------------------

def transpose(t: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    axes = tuple(range(t.ndim))[::-1] if axes is None else tuple(axes)
    inverse = tuple(np.argsort(axes))

    def backward(grad):
        return (np.transpose(grad, inverse),)

    return _result(np.transpose(t.data, axes), (t,), backward, "transpose")


def reshape(t: Tensor, shape: Sequence[int]) -> Tensor:
    original = t.shape
    try:
        data = t.data.reshape(shape)
    except ValueError:
        raise DimensionError(f"cannot reshape {original} into {tuple(shape)}") from None

    def backward(grad):
        return (grad.reshape(original),)

    return _result(data, (t,), backward, "reshape")


def take(t: Tensor, index) -> Tensor:
    # Basic or integer-array indexing; gradient scatters back with add.at
    def backward(grad):
        full = np.zeros_like(t.data)
        np.add.at(full, index, grad)
        return (full,)

    return _result(np.array(t.data[index]), (t,), backward, "take")


def concat(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    sizes = [x.shape[axis] for x in tensors]
    try:
        data = np.concatenate([x.data for x in tensors], axis=axis)
    except ValueError:
        shapes = ", ".join(str(x.shape) for x in tensors)
        raise DimensionError(f"concat along axis {axis} with shapes {shapes}") from None
    splits = np.cumsum(sizes)[:-1]

    def backward(grad):
        return tuple(np.split(grad, splits, axis=axis))

    return _result(data, tensors, backward, "concat")


def stack(tensors: Iterable[Tensor], axis: int = 0) -> Tensor:
    tensors = list(tensors)
    try:
        data = np.stack([x.data for x in tensors], axis=axis)
    except ValueError:
        shapes = ", ".join(str(x.shape) for x in tensors)
        raise DimensionError(f"stack with shapes {shapes}") from None

    def backward(grad):
        return tuple(np.take(grad, i, axis=axis) for i in range(len(tensors)))

    return _result(data, tensors, backward, "stack")


# ----------------------------------------------------------------------
# Reductions
# ----------------------------------------------------------------------

def reduce_sum(t: Tensor, axis: int | None = None, keepdims: bool = False) -> Tensor:
    shape = t.shape

    def backward(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.array(np.broadcast_to(grad, shape)),)

    return _result(np.asarray(t.data.sum(axis=axis, keepdims=keepdims)), (t,), backward, "sum")
