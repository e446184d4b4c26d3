"""Dense float64 tensors with taped reverse-mode differentiation.

A ``Tape`` records primitive ops in execution order while active; reversed
execution order is a valid topological order, so backward is a single
reverse sweep with additive gradient accumulation.  With no active tape,
ops run untracked (the inference fast path).

Op set: matmul, elementwise arithmetic with broadcasting, exp/log/tanh/
sigmoid/softplus/gelu, softmax/logsumexp, layernorm, concat/slice/reshape/
transpose, sum/mean, masked_fill, dropout.  Everything heavier is out of
scope by design.
"""

from __future__ import annotations

import threading

import numpy as np
from scipy.special import expit as _expit

from inkgen import _kernels as _k

__all__ = [
    "Tensor",
    "Tape",
    "NumericsError",
    "tensor",
    "concat",
    "softmax",
    "logsumexp",
    "log_softmax",
    "layernorm",
    "gelu",
    "softplus",
    "masked_fill",
    "dropout",
    "set_nan_check",
    "nan_check_enabled",
]


class NumericsError(RuntimeError):
    """Shape, scalarity, or finiteness contract violation in tensor math."""


_state = threading.local()
_NAN_CHECK = False


def set_nan_check(enabled):
    """Toggle the per-op finiteness barrier (off by default for speed)."""
    global _NAN_CHECK
    _NAN_CHECK = bool(enabled)


def nan_check_enabled():
    return _NAN_CHECK


def _tape_stack():
    stack = getattr(_state, "tapes", None)
    if stack is None:
        stack = _state.tapes = []
    return stack


def _active_tape():
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    """A dense float64 array plus gradient bookkeeping."""

    __slots__ = ("data", "grad", "requires_grad", "name")

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data)

    def detach(self):
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        flag = ", grad" if self.requires_grad else ""
        label = f" {self.name!r}" if self.name else ""
        return f"<Tensor{label} shape={self.data.shape}{flag}>"

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return neg(self)

    def __getitem__(self, idx):
        return take(self, idx)

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)

    def tanh(self):
        return tanh(self)

    def sigmoid(self):
        return sigmoid(self)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, axes):
        return transpose(self, axes)


def tensor(data, requires_grad=False, name=None):
    return Tensor(data, requires_grad=requires_grad, name=name)


def _as_tensor(x):
    return x if isinstance(x, Tensor) else Tensor(x)


class Tape:
    """Execution-ordered record of ops with their backward closures."""

    def __init__(self):
        self._records = []

    def __enter__(self):
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _tape_stack().pop()
        assert popped is self
        return False

    def __len__(self):
        return len(self._records)

    def _record(self, out, parents, vjp, op_name):
        self._records.append((out, parents, vjp, op_name))

    def backward(self, loss, params=None):
        """Accumulate d(loss)/d(leaf) into ``.grad`` of every reachable
        requires_grad tensor.  ``params`` optionally lists leaves that must
        end up with a grad (zeros if the loss does not depend on them)."""
        if not isinstance(loss, Tensor):
            raise NumericsError("backward target must be a Tensor")
        if loss.data.size != 1:
            raise NumericsError(f"backward target must be scalar, got shape {loss.data.shape}")
        grads = {id(loss): np.ones_like(loss.data)}
        holders = {id(loss): loss}
        for out, parents, vjp, op_name in reversed(self._records):
            g = grads.pop(id(out), None)
            holders.pop(id(out), None)
            if g is None:
                continue
            pgrads = vjp(g)
            for p, pg in zip(parents, pgrads):
                if pg is None or not p.requires_grad:
                    continue
                if _NAN_CHECK and not np.all(np.isfinite(pg)):
                    raise NumericsError(f"non-finite gradient out of {op_name}")
                key = id(p)
                acc = grads.get(key)
                grads[key] = pg if acc is None else acc + pg
                holders[key] = p
        for key, g in grads.items():
            leaf = holders[key]
            leaf.grad = g if leaf.grad is None else leaf.grad + g
        if params is not None:
            for p in params:
                if p.requires_grad and p.grad is None:
                    p.grad = np.zeros_like(p.data)


def _make(out_data, parents, vjp, op_name):
    requires = any(p.requires_grad for p in parents)
    out = Tensor(out_data, requires_grad=requires)
    if _NAN_CHECK and not np.all(np.isfinite(out_data)):
        raise NumericsError(f"non-finite values out of {op_name}")
    if requires:
        tape = _active_tape()
        if tape is not None:
            tape._record(out, parents, vjp, op_name)
    return out


def _unbroadcast(g, shape):
    """Sum a broadcast gradient back down to ``shape``."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


# -- arithmetic ------------------------------------------------------------


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)

    def vjp(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return _make(a.data + b.data, (a, b), vjp, "add")


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)

    def vjp(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)

    return _make(a.data - b.data, (a, b), vjp, "sub")


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)

    def vjp(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return _make(a.data * b.data, (a, b), vjp, "mul")


def div(a, b):
    a, b = _as_tensor(a), _as_tensor(b)

    def vjp(g):
        return (
            _unbroadcast(g / b.data, a.data.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape),
        )

    return _make(a.data / b.data, (a, b), vjp, "div")


def neg(a):
    a = _as_tensor(a)
    return _make(-a.data, (a,), lambda g: (-g,), "neg")


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise NumericsError("matmul operands must have ndim >= 2")
    if a.data.shape[-1] != b.data.shape[-2]:
        raise NumericsError(
            f"matmul inner dimensions differ: {a.data.shape} @ {b.data.shape}"
        )

    def vjp(g):
        ga = g @ np.swapaxes(b.data, -1, -2)
        gb = np.swapaxes(a.data, -1, -2) @ g
        return _unbroadcast(ga, a.data.shape), _unbroadcast(gb, b.data.shape)

    return _make(a.data @ b.data, (a, b), vjp, "matmul")


# -- pointwise nonlinearities ---------------------------------------------


def exp(a):
    a = _as_tensor(a)
    out_data = np.exp(a.data)
    return _make(out_data, (a,), lambda g: (g * out_data,), "exp")


def log(a):
    a = _as_tensor(a)
    return _make(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


def tanh(a):
    a = _as_tensor(a)
    out_data = np.tanh(a.data)
    return _make(out_data, (a,), lambda g: (g * (1.0 - out_data * out_data),), "tanh")


def sigmoid(a):
    a = _as_tensor(a)
    out_data = _expit(a.data)
    return _make(out_data, (a,), lambda g: (g * out_data * (1.0 - out_data),), "sigmoid")


def softplus(a):
    a = _as_tensor(a)
    return _make(np.logaddexp(0.0, a.data), (a,), lambda g: (g * _expit(a.data),), "softplus")


def gelu(a):
    a = _as_tensor(a)
    return _make(_k.gelu(a.data), (a,), lambda g: (_k.gelu_grad(a.data, g),), "gelu")


# -- reductions ------------------------------------------------------------


def _norm_axes(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(a % ndim for a in axis)


def tsum(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    axes = _norm_axes(axis, a.ndim)
    out_data = np.sum(a.data, axis=axes, keepdims=keepdims)

    def vjp(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g, a.data.shape).copy(),)

    return _make(out_data, (a,), vjp, "sum")


def tmean(a, axis=None, keepdims=False):
    a = _as_tensor(a)
    axes = _norm_axes(axis, a.ndim)
    count = int(np.prod([a.data.shape[i] for i in axes])) if axes else 1
    out_data = np.mean(a.data, axis=axes, keepdims=keepdims)

    def vjp(g):
        if not keepdims:
            g = np.expand_dims(g, axes)
        return (np.broadcast_to(g / count, a.data.shape).copy(),)

    return _make(out_data, (a,), vjp, "mean")


# -- softmax family --------------------------------------------------------


def _move_last(x, axis):
    return np.moveaxis(x, axis, -1)


def softmax(a, axis=-1):
    """Numerically stabilized softmax; rows of all -inf are a caller error."""
    a = _as_tensor(a)
    if axis % a.ndim == a.ndim - 1:
        try:
            out_data = _k.softmax(a.data)
        except FloatingPointError as err:
            raise NumericsError(str(err)) from None
        vjp = lambda g: (_k.softmax_grad(out_data, g),)
        return _make(out_data, (a,), vjp, "softmax")
    moved = _move_last(a.data, axis)
    try:
        y = _k.softmax(np.ascontiguousarray(moved))
    except FloatingPointError as err:
        raise NumericsError(str(err)) from None
    out_data = np.moveaxis(y, -1, axis)

    def vjp(g):
        gm = _k.softmax_grad(y, np.ascontiguousarray(_move_last(g, axis)))
        return (np.moveaxis(gm, -1, axis),)

    return _make(out_data, (a,), vjp, "softmax")


def logsumexp(a, axis=-1):
    a = _as_tensor(a)
    if axis % a.ndim != a.ndim - 1:
        raise NumericsError("logsumexp supports only the last axis")
    try:
        lse = _k.logsumexp(a.data)
    except FloatingPointError as err:
        raise NumericsError(str(err)) from None
    vjp = lambda g: (_k.logsumexp_grad(a.data, lse, g),)
    return _make(lse, (a,), vjp, "logsumexp")


def log_softmax(a, axis=-1):
    a = _as_tensor(a)
    lse = logsumexp(a, axis=axis)
    return sub(a, reshape(lse, lse.shape + (1,)))


# -- layernorm -------------------------------------------------------------


def layernorm(x, gamma, beta, eps=1e-5):
    """Normalization over the last axis with learned scale and shift."""
    x, gamma, beta = _as_tensor(x), _as_tensor(gamma), _as_tensor(beta)
    y, mu, rstd = _k.layernorm(x.data, gamma.data, beta.data, eps)

    def vjp(g):
        gx, ggamma, gbeta = _k.layernorm_grad(x.data, gamma.data, mu, rstd, g)
        return gx, ggamma, gbeta

    return _make(y, (x, gamma, beta), vjp, "layernorm")


# -- shape ops -------------------------------------------------------------


def reshape(a, shape):
    a = _as_tensor(a)
    old = a.data.shape
    return _make(a.data.reshape(shape), (a,), lambda g: (g.reshape(old),), "reshape")


def transpose(a, axes):
    a = _as_tensor(a)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _make(
        np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),), "transpose"
    )


def concat(tensors, axis=0):
    tensors = [_as_tensor(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        return tuple(np.ascontiguousarray(p) for p in np.split(g, splits, axis=axis))

    return _make(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), vjp, "concat")


def take(a, idx):
    """Basic (slice/int/tuple) indexing; fancy indexing is not supported."""
    a = _as_tensor(a)
    out_data = a.data[idx]
    if not isinstance(out_data, np.ndarray):
        out_data = np.asarray(out_data)

    def vjp(g):
        full = np.zeros_like(a.data)
        full[idx] += g.reshape(full[idx].shape)
        return (full,)

    return _make(out_data, (a,), vjp, "slice")


# -- masking and dropout ---------------------------------------------------


def masked_fill(a, mask, value):
    """Replace entries where ``mask`` is true; their gradient is zero."""
    a = _as_tensor(a)
    mask = np.asarray(mask, dtype=bool)
    out_data = np.where(mask, float(value), a.data)

    def vjp(g):
        return (np.where(mask, 0.0, g),)

    return _make(out_data, (a,), vjp, "masked_fill")


def dropout(a, p, rng):
    """Inverted dropout driven by an explicit numpy Generator."""
    a = _as_tensor(a)
    if p <= 0.0:
        return a
    if p >= 1.0:
        raise NumericsError("dropout rate must be < 1")
    keep = (rng.random(a.data.shape) >= p) / (1.0 - p)
    return _make(a.data * keep, (a,), lambda g: (g * keep,), "dropout")
