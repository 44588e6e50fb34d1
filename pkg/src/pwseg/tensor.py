"""Dense tensors with reverse-mode automatic differentiation.

Covers exactly the operations the taggers need: matmul, broadcasting
add/sub/mul, sigmoid, tanh, concat, row gather, logsumexp, sum, slicing and
dropout mask application. Training runs in float32; gradient checking runs
the same graph in float64, where central finite differences are reliable.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ShapeError

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable graph recording (inference / decoding)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    """A numpy array plus an optional backward record.

    A computation graph is confined to one thread; parameter tensors are
    leaves (requires_grad=True) whose .grad accumulates across uses.
    """

    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_bwd")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._bwd: Callable[[np.ndarray], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate(self, g: np.ndarray) -> None:
        # Always copy on first write: one upstream gradient array may be
        # shared by several parents, and later in-place adds must not alias.
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype)
        else:
            self.grad += g

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}{tag})"


def _record(out: Tensor, parents: Sequence[Tensor], bwd: Callable) -> Tensor:
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._bwd = bwd
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a gradient down to `shape`, undoing numpy broadcasting."""
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _binary(op: str, a: Tensor, b: Tensor, fwd, da, db) -> Tensor:
    try:
        out = Tensor(fwd(a.data, b.data))
    except ValueError as exc:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape}") from exc

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate(_unbroadcast(da(g), a.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(db(g), b.shape))

    return _record(out, (a, b), bwd)


def add(a: Tensor, b: Tensor) -> Tensor:
    return _binary("add", a, b, np.add, lambda g: g, lambda g: g)


def sub(a: Tensor, b: Tensor) -> Tensor:
    return _binary("sub", a, b, np.subtract, lambda g: g, lambda g: -g)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return _binary(
        "mul", a, b, np.multiply, lambda g: g * b.data, lambda g: g * a.data
    )


def scale(x: Tensor, c: float) -> Tensor:
    out = Tensor(x.data * c)

    def bwd(g: np.ndarray) -> None:
        x.accumulate(g * c)

    return _record(out, (x,), bwd)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: shapes {a.shape} and {b.shape}")
    out = Tensor(a.data @ b.data)

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate(g @ b.data.T)
        if b.requires_grad:
            b.accumulate(a.data.T @ g)

    return _record(out, (a, b), bwd)


def transpose(x: Tensor) -> Tensor:
    if x.data.ndim != 2:
        raise ShapeError(f"transpose: shape {x.shape}")
    out = Tensor(x.data.T)

    def bwd(g: np.ndarray) -> None:
        x.accumulate(g.T)

    return _record(out, (x,), bwd)


def sigmoid(x: Tensor) -> Tensor:
    # 0.5*(1+tanh(x/2)) is the numerically stable logistic.
    y = 0.5 * (1.0 + np.tanh(0.5 * x.data))
    out = Tensor(y)

    def bwd(g: np.ndarray) -> None:
        x.accumulate(g * (y * (1.0 - y)))

    return _record(out, (x,), bwd)


def tanh(x: Tensor) -> Tensor:
    y = np.tanh(x.data)
    out = Tensor(y)

    def bwd(g: np.ndarray) -> None:
        x.accumulate(g * (1.0 - y * y))

    return _record(out, (x,), bwd)


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ShapeError("concat: empty input")
    try:
        out = Tensor(np.concatenate([t.data for t in tensors], axis=axis))
    except ValueError as exc:
        raise ShapeError(
            f"concat: shapes {[t.shape for t in tensors]} along axis {axis}"
        ) from exc
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum(sizes)[:-1]

    def bwd(g: np.ndarray) -> None:
        for t, piece in zip(tensors, np.split(g, offsets, axis=axis)):
            if t.requires_grad:
                t.accumulate(piece)

    return _record(out, tuple(tensors), bwd)


def gather_rows(m: Tensor, ids) -> Tensor:
    """Rows of a 2-D tensor selected by integer id (embedding lookup)."""
    ids = np.asarray(ids, dtype=np.int64)
    if m.data.ndim != 2:
        raise ShapeError(f"gather_rows: table shape {m.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= m.shape[0]):
        raise IndexError(f"gather_rows: id out of range for table of {m.shape[0]} rows")
    out = Tensor(m.data[ids])

    def bwd(g: np.ndarray) -> None:
        gm = np.zeros_like(m.data)
        np.add.at(gm, ids, g)
        m.accumulate(gm)

    return _record(out, (m,), bwd)


def logsumexp(x: Tensor, axis: int, keepdims: bool = False) -> Tensor:
    mx = x.data.max(axis=axis, keepdims=True)
    ex = np.exp(x.data - mx)
    s = ex.sum(axis=axis, keepdims=True)
    y_keep = mx + np.log(s)
    out = Tensor(y_keep if keepdims else np.squeeze(y_keep, axis=axis))
    softmax = ex / s

    def bwd(g: np.ndarray) -> None:
        gk = g if keepdims else np.expand_dims(g, axis)
        x.accumulate(softmax * gk)

    return _record(out, (x,), bwd)


def tsum(x: Tensor, axis: int | None = None, keepdims: bool = False) -> Tensor:
    out = Tensor(x.data.sum(axis=axis, keepdims=keepdims))

    def bwd(g: np.ndarray) -> None:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        x.accumulate(np.broadcast_to(g, x.shape).astype(x.data.dtype, copy=False))

    return _record(out, (x,), bwd)


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    out = Tensor(x.data.reshape(shape))

    def bwd(g: np.ndarray) -> None:
        x.accumulate(g.reshape(x.shape))

    return _record(out, (x,), bwd)


def slice_axis(x: Tensor, axis: int, start: int, stop: int) -> Tensor:
    idx = (slice(None),) * axis + (slice(start, stop),)
    out = Tensor(x.data[idx])

    def bwd(g: np.ndarray) -> None:
        gx = np.zeros_like(x.data)
        gx[idx] = g
        x.accumulate(gx)

    return _record(out, (x,), bwd)


def dropout_mask(shape, rate: float, rng: np.random.Generator, dtype) -> Tensor:
    """Inverted-dropout mask: 0 with probability `rate`, else 1/(1-rate)."""
    keep = (rng.random(shape) >= rate).astype(dtype)
    return Tensor(keep * np.asarray(1.0 / (1.0 - rate), dtype=dtype))


def dropout_mask_apply(x: Tensor, mask: Tensor | None) -> Tensor:
    """Apply a dropout mask; None (inference) is the identity."""
    if mask is None:
        return x
    return mul(x, mask)


def backward(loss: Tensor) -> None:
    """Accumulate d(loss)/d(leaf) into .grad of every reachable leaf."""
    if loss.data.size != 1:
        raise ShapeError(f"backward: loss must be scalar, got shape {loss.shape}")
    topo: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, done = stack.pop()
        if done:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in visited:
                stack.append((p, False))
    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._bwd is not None and node.grad is not None:
            node._bwd(node.grad)


def grad_check(
    f: Callable[[], Tensor],
    params: dict[str, Tensor],
    eps: float = 1e-5,
) -> dict[str, float]:
    """Compare reverse-mode gradients of f() against central differences.

    f must be deterministic (dropout off) and the parameters float64.
    Returns the max relative error per parameter array; nothing is thrown
    on failure.
    """
    for p in params.values():
        p.zero_grad()
    loss = f()
    backward(loss)
    analytic = {
        name: (np.zeros_like(p.data) if p.grad is None else p.grad.copy())
        for name, p in params.items()
    }
    report: dict[str, float] = {}
    for name, p in params.items():
        flat = p.data.reshape(-1)
        g_ad = analytic[name].reshape(-1)
        worst = 0.0
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            hi = float(f().data)
            flat[i] = orig - eps
            lo = float(f().data)
            flat[i] = orig
            g_fd = (hi - lo) / (2.0 * eps)
            rel = abs(g_ad[i] - g_fd) / (abs(g_ad[i]) + abs(g_fd) + 1e-12)
            worst = max(worst, rel)
        report[name] = worst
    return report
