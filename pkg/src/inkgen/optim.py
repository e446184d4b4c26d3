"""Adam with bias correction, plus global-norm gradient clipping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from inkgen.autodiff import NumericsError, Tensor


@dataclass
class AdamState:
    """First/second moment estimates and step counter for a parameter set."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def init(cls, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        state = cls(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
        for name, p in params.items():
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        return state


def adam_step(params, grads, state):
    """One Adam update, in place on ``params``.  ``grads`` maps the same
    names to gradient arrays; missing names are treated as zero gradient."""
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            continue
        if g.shape != p.data.shape:
            raise NumericsError(f"gradient shape {g.shape} != param shape {p.data.shape} for {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p.data -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return params


class Adam:
    """Convenience wrapper reading gradients off the parameter tensors."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = dict(params)
        self.state = AdamState.init(self.params, lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def step(self):
        grads = {
            name: p.grad for name, p in self.params.items() if p.grad is not None
        }
        adam_step(self.params, grads, self.state)

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None


def grad_global_norm(params):
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float(np.sum(p.grad * p.grad))
    return float(np.sqrt(total))


def clip_grads_(params, max_norm):
    """Scale all gradients so their global norm is at most ``max_norm``.
    Returns the pre-clip norm."""
    norm = grad_global_norm(params)
    if max_norm is not None and norm > max_norm > 0:
        scale = max_norm / (norm + 1e-12)
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale
    return norm


def params_as_arrays(params):
    return {name: p.data for name, p in params.items()}


def load_param_arrays(params, arrays):
    """Copy checkpoint arrays into live parameter tensors (shape-checked)."""
    for name, p in params.items():
        arr = arrays.get(name)
        if arr is None:
            raise NumericsError(f"checkpoint missing parameter {name!r}")
        if tuple(arr.shape) != tuple(p.data.shape):
            raise NumericsError(
                f"checkpoint shape {arr.shape} != model shape {p.data.shape} for {name!r}"
            )
        p.data = arr.astype(np.float64, copy=True)


def _require(cond, msg):
    if not cond:
        raise NumericsError(msg)


def make_param(rng, shape, scale=None, name=None):
    """Glorot-uniform initialized trainable tensor."""
    shape = tuple(shape)
    if scale is None:
        fan_in = shape[-2] if len(shape) >= 2 else shape[-1]
        fan_out = shape[-1]
        scale = float(np.sqrt(6.0 / (fan_in + fan_out)))
    _require(all(n >= 1 for n in shape), f"bad parameter shape {shape}")
    data = rng.uniform(-scale, scale, size=shape)
    return Tensor(data, requires_grad=True, name=name)
