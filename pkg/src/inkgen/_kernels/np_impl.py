"""Numpy reference implementations of the hot kernels.

Same contracts as the compiled module ``_ck``; selected at import time by
``inkgen._kernels`` when the extension is unavailable or disabled.  All
kernels operate on float64 arrays and treat the last axis as the reduced
(row) axis.
"""

import numpy as np
from scipy.special import erf as _erf

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


def softmax(x):
    """Row-wise stabilized softmax over the last axis."""
    m = np.max(x, axis=-1, keepdims=True)
    if not np.all(np.isfinite(m)):
        raise FloatingPointError("softmax: non-finite row maximum (fully masked row?)")
    e = np.exp(x - m)
    return e / np.sum(e, axis=-1, keepdims=True)


def softmax_grad(y, gy):
    """VJP of softmax given its output y and upstream gradient gy."""
    dot = np.sum(y * gy, axis=-1, keepdims=True)
    return y * (gy - dot)


def logsumexp(x):
    """Row-wise stabilized log-sum-exp over the last axis."""
    m = np.max(x, axis=-1)
    if not np.all(np.isfinite(m)):
        raise FloatingPointError("logsumexp: non-finite row maximum")
    return m + np.log(np.sum(np.exp(x - m[..., None]), axis=-1))


def logsumexp_grad(x, lse, g):
    """VJP of logsumexp: softmax(x) scaled by the upstream gradient."""
    return np.exp(x - lse[..., None]) * g[..., None]


def layernorm(x, gamma, beta, eps):
    """Normalize over the last axis; returns (y, mean, rstd) for the VJP."""
    mu = np.mean(x, axis=-1, keepdims=True)
    var = np.mean((x - mu) ** 2, axis=-1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + eps)
    y = (x - mu) * rstd * gamma + beta
    return y, mu.squeeze(-1), rstd.squeeze(-1)


def layernorm_grad(x, gamma, mu, rstd, gy):
    """VJP of layernorm; returns (gx, ggamma, gbeta)."""
    xhat = (x - mu[..., None]) * rstd[..., None]
    gxhat = gy * gamma
    n = x.shape[-1]
    red = x.ndim - 1
    gbeta = np.sum(gy, axis=tuple(range(red)))
    ggamma = np.sum(gy * xhat, axis=tuple(range(red)))
    m1 = np.mean(gxhat, axis=-1, keepdims=True)
    m2 = np.mean(gxhat * xhat, axis=-1, keepdims=True)
    gx = (gxhat - m1 - xhat * m2) * rstd[..., None]
    # n enters only through the means above
    del n
    return gx, ggamma, gbeta


def gelu(x):
    """Exact Gaussian-CDF gelu: x * Phi(x)."""
    return 0.5 * x * (1.0 + _erf(x * _INV_SQRT2))


def gelu_grad(x, gy):
    """VJP of gelu: Phi(x) + x * phi(x)."""
    phi = _INV_SQRT2PI * np.exp(-0.5 * x * x)
    cdf = 0.5 * (1.0 + _erf(x * _INV_SQRT2))
    return gy * (cdf + x * phi)


def levenshtein(a, b):
    """Edit distance between two int arrays (unit insert/delete/substitute)."""
    a = np.asarray(a, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = i
        sub = prev[:-1] + (b != a[i - 1])
        np.minimum(sub, prev[1:] + 1, out=cur[1:])
        # insertion column has a sequential dependency
        for j in range(1, m + 1):
            if cur[j - 1] + 1 < cur[j]:
                cur[j] = cur[j - 1] + 1
        prev, cur = cur, prev
    return int(prev[m])
