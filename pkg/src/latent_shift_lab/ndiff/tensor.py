# latent-shift-lab/src/latent_shift_lab/ndiff/tensor.py

"""
Dense float64 tensors recorded in a define-by-run graph.

A Tensor is rank 1 or rank 2. Every result of `apply` remembers its inputs
and a closure that maps the output gradient to input gradients; `backward`
walks the graph in a fixed topological order so accumulation is bitwise
reproducible.
"""

from typing import Callable, Iterable, Sequence

import numpy as np

from ..core.constants import LEAKY_RELU_SLOPE
from ..core.errors import DomainError, ShapeError

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "name", "_op", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        _check_rank("tensor", arr)
        self.data = arr
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self.name = name
        self._op: str | None = None
        self._parents: tuple["Tensor", ...] = ()
        self._backward_fn: BackwardFn | None = None

    @classmethod
    def _from_op(cls, data: np.ndarray, op: str, parents: tuple["Tensor", ...], backward_fn: BackwardFn | None):
        out = cls.__new__(cls)
        _check_rank(op, data)
        out.data = data
        out.requires_grad = bool(parents)
        out.grad = None
        out.name = None
        out._op = op
        out._parents = parents
        out._backward_fn = backward_fn
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return apply("transpose", [self])

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError("item", self.shape)
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # Operator sugar, all routed through apply
    def __add__(self, other):
        return apply("add", [self, other])

    def __radd__(self, other):
        return apply("add", [other, self])

    def __sub__(self, other):
        return apply("sub", [self, other])

    def __rsub__(self, other):
        return apply("sub", [other, self])

    def __mul__(self, other):
        return apply("mul", [self, other])

    def __rmul__(self, other):
        return apply("mul", [other, self])

    def __truediv__(self, other):
        return apply("div", [self, other])

    def __rtruediv__(self, other):
        return apply("div", [other, self])

    def __neg__(self):
        return apply("mul", [self, -1.0])

    def __matmul__(self, other):
        return apply("matmul", [self, other])

    def sum(self, axis: int | None = None) -> "Tensor":
        return apply("sum", [self], axis=axis)

    def mean(self, axis: int | None = None) -> "Tensor":
        return apply("mean", [self], axis=axis)


def _check_rank(op: str, arr: np.ndarray):
    if arr.ndim not in (1, 2) or arr.size == 0:
        raise ShapeError(op, arr.shape)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


# --- Op rules: each returns (output data, backward closure) ---

def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for i, dim in enumerate(shape):
        if dim == 1 and grad.shape[i] != 1:
            grad = grad.sum(axis=i, keepdims=True)
    return grad


def _broadcast_check(op: str, a: np.ndarray, b: np.ndarray):
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape) from None


def _require_rank2(op: str, *arrays: np.ndarray):
    for arr in arrays:
        if arr.ndim != 2:
            raise ShapeError(op, *(a.shape for a in arrays))


def _matmul(a, b):
    _require_rank2("matmul", a, b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)
    return a @ b, lambda g: (g @ b.T, a.T @ g)


def _add(a, b):
    _broadcast_check("add", a, b)
    return a + b, lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape))


def _sub(a, b):
    _broadcast_check("sub", a, b)
    return a - b, lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape))


def _mul(a, b):
    _broadcast_check("mul", a, b)
    return a * b, lambda g: (_unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape))


def _div(a, b):
    _broadcast_check("div", a, b)
    if np.any(b == 0.0):
        raise DomainError("div", "division by zero")
    return a / b, lambda g: (_unbroadcast(g / b, a.shape), _unbroadcast(-g * a / (b * b), b.shape))


def _tanh(x):
    out = np.tanh(x)
    return out, lambda g: (g * (1.0 - out * out),)


def _leaky_relu(x, slope: float = LEAKY_RELU_SLOPE):
    positive = x > 0
    return np.where(positive, x, slope * x), lambda g: (np.where(positive, g, slope * g),)


def _exp(x):
    out = np.exp(x)
    return out, lambda g: (g * out,)


def _log(x):
    if np.any(x <= 0.0):
        raise DomainError("log", "non-positive operand")
    return np.log(x), lambda g: (g / x,)


def _square(x):
    return x * x, lambda g: (2.0 * x * g,)


def _reduce(op: str, x: np.ndarray, axis: int | None):
    if axis is None:
        return np.array([x.sum()])
    if axis not in (0, 1) or axis >= x.ndim:
        raise ShapeError(f"{op}(axis={axis})", x.shape)
    return x.sum(axis=axis, keepdims=True)


def _sum(x, axis: int | None = None):
    return _reduce("sum", x, axis), lambda g: (np.broadcast_to(g, x.shape).copy(),)


def _mean(x, axis: int | None = None):
    count = x.size if axis is None else x.shape[axis]
    return _reduce("mean", x, axis) / count, lambda g: (np.broadcast_to(g / count, x.shape).copy(),)


def _softmax_rows(x):
    _require_rank2("softmax_rows", x)
    e = np.exp(x - x.max(axis=1, keepdims=True))
    s = e / e.sum(axis=1, keepdims=True)
    return s, lambda g: (s * (g - (g * s).sum(axis=1, keepdims=True)),)


def _log_softmax_rows(x):
    _require_rank2("log_softmax_rows", x)
    shifted = x - x.max(axis=1, keepdims=True)
    out = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    s = np.exp(out)
    return out, lambda g: (g - s * g.sum(axis=1, keepdims=True),)


def _concat_cols(*parts):
    _require_rank2("concat_cols", *parts)
    rows = {p.shape[0] for p in parts}
    if len(rows) != 1:
        raise ShapeError("concat_cols", *(p.shape for p in parts))
    bounds = np.cumsum([0] + [p.shape[1] for p in parts])

    def backward(g):
        return tuple(g[:, bounds[i]:bounds[i + 1]].copy() for i in range(len(parts)))

    return np.concatenate(parts, axis=1), backward


def _slice_cols(x, start: int = 0, stop: int | None = None):
    _require_rank2("slice_cols", x)
    stop = x.shape[1] if stop is None else stop
    if not 0 <= start < stop <= x.shape[1]:
        raise ShapeError(f"slice_cols[{start}:{stop}]", x.shape)

    def backward(g):
        full = np.zeros_like(x)
        full[:, start:stop] = g
        return (full,)

    return x[:, start:stop].copy(), backward


def _transpose(x):
    _require_rank2("transpose", x)
    return x.T.copy(), lambda g: (g.T.copy(),)


def _clip(x, lo: float, hi: float):
    inside = (x > lo) & (x < hi)
    return np.clip(x, lo, hi), lambda g: (np.where(inside, g, 0.0),)


_OPS: dict[str, tuple[Callable, int | None]] = {
    "matmul": (_matmul, 2),
    "add": (_add, 2),
    "sub": (_sub, 2),
    "mul": (_mul, 2),
    "div": (_div, 2),
    "tanh": (_tanh, 1),
    "leaky_relu": (_leaky_relu, 1),
    "exp": (_exp, 1),
    "log": (_log, 1),
    "square": (_square, 1),
    "sum": (_sum, 1),
    "mean": (_mean, 1),
    "softmax_rows": (_softmax_rows, 1),
    "log_softmax_rows": (_log_softmax_rows, 1),
    "concat_cols": (_concat_cols, None),
    "slice_cols": (_slice_cols, 1),
    "transpose": (_transpose, 1),
    "clip": (_clip, 1),
}

OP_KINDS: tuple[str, ...] = tuple(_OPS)


def apply(kind: str, inputs: Iterable, **attrs) -> Tensor:
    """Evaluate op `kind` on `inputs` and record the result in the graph."""
    try:
        rule, arity = _OPS[kind]
    except KeyError:
        raise DomainError(kind, "unknown op kind") from None
    tensors = tuple(as_tensor(t) for t in inputs)
    if (arity is not None and len(tensors) != arity) or not tensors:
        raise ShapeError(f"{kind} (arity)", *(t.shape for t in tensors))

    data, backward_fn = rule(*(t.data for t in tensors), **attrs)
    if any(t.requires_grad for t in tensors):
        return Tensor._from_op(data, kind, tensors, backward_fn)
    return Tensor._from_op(data, kind, (), None)


def _topological_order(root: Tensor) -> list[Tensor]:
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
        for parent in reversed(node._parents):
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(output: Tensor, params: Sequence[Tensor] | None = None) -> dict[Tensor, np.ndarray]:
    """
    Reverse-mode pass from a one-element `output`.

    Leaf tensors with requires_grad accumulate into `.grad`. Returns the
    gradients contributed by this pass; when `params` is given the map is
    keyed by exactly those tensors, with zeros for unreachable ones.
    """
    if output.data.size != 1:
        raise ShapeError("backward (non-scalar output)", output.shape)

    contributed: dict[int, np.ndarray] = {}
    leaves: dict[int, Tensor] = {}
    pending: dict[int, np.ndarray] = {id(output): np.ones_like(output.data)}

    for node in reversed(_topological_order(output)):
        g = pending.pop(id(node), None)
        if g is None:
            continue
        if node._backward_fn is None:
            if node.requires_grad:
                node.grad = g.copy() if node.grad is None else node.grad + g
                contributed[id(node)] = g
                leaves[id(node)] = node
            continue
        for parent, parent_grad in zip(node._parents, node._backward_fn(g)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            pending[key] = pending[key] + parent_grad if key in pending else parent_grad

    if params is None:
        return {leaves[k]: v for k, v in contributed.items()}

    result: dict[Tensor, np.ndarray] = {}
    for p in params:
        if id(p) in contributed:
            result[p] = contributed[id(p)]
        else:
            if p.grad is None:
                p.grad = np.zeros_like(p.data)
            result[p] = np.zeros_like(p.data)
    return result
