# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: fused row-wise softmax / logsumexp / layernorm, gelu,
and the edit-distance DP.  Contracts mirror ``np_impl`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, sqrt, erf, INFINITY, isfinite

cnp.import_array()

cdef double INV_SQRT2 = 1.0 / sqrt(2.0)
cdef double INV_SQRT2PI = 1.0 / sqrt(2.0 * 3.14159265358979323846)


cdef inline tuple _rows(object x):
    """View x as (rows, cols) over the last axis."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t cols = arr.shape[arr.ndim - 1]
    return arr.reshape(-1, cols), arr.shape


def softmax(x):
    a, shape = _rows(x)
    cdef double[:, ::1] xv = a
    out = np.empty_like(a)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, c, R = xv.shape[0], C = xv.shape[1]
    cdef double m, s, v
    for r in range(R):
        m = -INFINITY
        for c in range(C):
            if xv[r, c] > m:
                m = xv[r, c]
        if not isfinite(m):
            raise FloatingPointError("softmax: non-finite row maximum (fully masked row?)")
        s = 0.0
        for c in range(C):
            v = exp(xv[r, c] - m)
            ov[r, c] = v
            s += v
        s = 1.0 / s
        for c in range(C):
            ov[r, c] *= s
    return out.reshape(shape)


def softmax_grad(y, gy):
    a, shape = _rows(y)
    g, _ = _rows(gy)
    cdef double[:, ::1] yv = a
    cdef double[:, ::1] gv = g
    out = np.empty_like(a)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, c, R = yv.shape[0], C = yv.shape[1]
    cdef double dot
    for r in range(R):
        dot = 0.0
        for c in range(C):
            dot += yv[r, c] * gv[r, c]
        for c in range(C):
            ov[r, c] = yv[r, c] * (gv[r, c] - dot)
    return out.reshape(shape)


def logsumexp(x):
    a, shape = _rows(x)
    cdef double[:, ::1] xv = a
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t r, c, R = xv.shape[0], C = xv.shape[1]
    cdef double m, s
    for r in range(R):
        m = -INFINITY
        for c in range(C):
            if xv[r, c] > m:
                m = xv[r, c]
        if not isfinite(m):
            raise FloatingPointError("logsumexp: non-finite row maximum")
        s = 0.0
        for c in range(C):
            s += exp(xv[r, c] - m)
        ov[r] = m + log(s)
    return out.reshape(shape[:-1])


def logsumexp_grad(x, lse, g):
    a, shape = _rows(x)
    cdef double[:, ::1] xv = a
    l = np.ascontiguousarray(lse, dtype=np.float64).reshape(-1)
    gg = np.ascontiguousarray(g, dtype=np.float64).reshape(-1)
    cdef double[::1] lv = l
    cdef double[::1] gv = gg
    out = np.empty_like(a)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r, c, R = xv.shape[0], C = xv.shape[1]
    for r in range(R):
        for c in range(C):
            ov[r, c] = exp(xv[r, c] - lv[r]) * gv[r]
    return out.reshape(shape)


def layernorm(x, gamma, beta, double eps):
    a, shape = _rows(x)
    cdef double[:, ::1] xv = a
    gm = np.ascontiguousarray(gamma, dtype=np.float64)
    bt = np.ascontiguousarray(beta, dtype=np.float64)
    cdef double[::1] gv = gm
    cdef double[::1] bv = bt
    out = np.empty_like(a)
    mean = np.empty(xv.shape[0], dtype=np.float64)
    rstd = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef double[::1] mv = mean
    cdef double[::1] rv = rstd
    cdef Py_ssize_t r, c, R = xv.shape[0], C = xv.shape[1]
    cdef double mu, var, d, rs
    for r in range(R):
        mu = 0.0
        for c in range(C):
            mu += xv[r, c]
        mu /= C
        var = 0.0
        for c in range(C):
            d = xv[r, c] - mu
            var += d * d
        var /= C
        rs = 1.0 / sqrt(var + eps)
        mv[r] = mu
        rv[r] = rs
        for c in range(C):
            ov[r, c] = (xv[r, c] - mu) * rs * gv[c] + bv[c]
    return out.reshape(shape), mean.reshape(shape[:-1]), rstd.reshape(shape[:-1])


def layernorm_grad(x, gamma, mu, rstd, gy):
    a, shape = _rows(x)
    g, _ = _rows(gy)
    cdef double[:, ::1] xv = a
    cdef double[:, ::1] gyv = g
    gm = np.ascontiguousarray(gamma, dtype=np.float64)
    cdef double[::1] gv = gm
    m = np.ascontiguousarray(mu, dtype=np.float64).reshape(-1)
    rs = np.ascontiguousarray(rstd, dtype=np.float64).reshape(-1)
    cdef double[::1] mv = m
    cdef double[::1] rv = rs
    gx = np.empty_like(a)
    cdef double[:, ::1] gxv = gx
    cdef Py_ssize_t R = xv.shape[0], C = xv.shape[1]
    ggamma = np.zeros(C, dtype=np.float64)
    gbeta = np.zeros(C, dtype=np.float64)
    cdef double[::1] ggv = ggamma
    cdef double[::1] gbv = gbeta
    cdef Py_ssize_t r, c
    cdef double xhat, gxhat, m1, m2
    for r in range(R):
        m1 = 0.0
        m2 = 0.0
        for c in range(C):
            xhat = (xv[r, c] - mv[r]) * rv[r]
            gxhat = gyv[r, c] * gv[c]
            m1 += gxhat
            m2 += gxhat * xhat
            ggv[c] += gyv[r, c] * xhat
            gbv[c] += gyv[r, c]
        m1 /= C
        m2 /= C
        for c in range(C):
            xhat = (xv[r, c] - mv[r]) * rv[r]
            gxhat = gyv[r, c] * gv[c]
            gxv[r, c] = (gxhat - m1 - xhat * m2) * rv[r]
    return gx.reshape(shape), ggamma, gbeta


def gelu(x):
    a = np.ascontiguousarray(x, dtype=np.float64)
    flat = a.reshape(-1)
    cdef double[::1] xv = flat
    out = np.empty_like(flat)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, N = xv.shape[0]
    cdef double v
    for i in range(N):
        v = xv[i]
        ov[i] = 0.5 * v * (1.0 + erf(v * INV_SQRT2))
    return out.reshape(a.shape)


def gelu_grad(x, gy):
    a = np.ascontiguousarray(x, dtype=np.float64)
    g = np.ascontiguousarray(gy, dtype=np.float64)
    flat = a.reshape(-1)
    gflat = g.reshape(-1)
    cdef double[::1] xv = flat
    cdef double[::1] gv = gflat
    out = np.empty_like(flat)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, N = xv.shape[0]
    cdef double v, cdf, phi
    for i in range(N):
        v = xv[i]
        cdf = 0.5 * (1.0 + erf(v * INV_SQRT2))
        phi = INV_SQRT2PI * exp(-0.5 * v * v)
        ov[i] = gv[i] * (cdf + v * phi)
    return out.reshape(a.shape)


def levenshtein(a, b):
    aa = np.ascontiguousarray(a, dtype=np.int32)
    bb = np.ascontiguousarray(b, dtype=np.int32)
    cdef int[::1] av = aa
    cdef int[::1] bv = bb
    cdef Py_ssize_t n = av.shape[0], m = bv.shape[0]
    if n == 0:
        return int(m)
    if m == 0:
        return int(n)
    prev = np.arange(m + 1, dtype=np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    cdef long long[::1] pv = prev
    cdef long long[::1] cv = cur
    cdef long long[::1] tmp
    cdef Py_ssize_t i, j
    cdef long long best, cand
    for i in range(1, n + 1):
        cv[0] = i
        for j in range(1, m + 1):
            best = pv[j - 1] + (0 if av[i - 1] == bv[j - 1] else 1)
            cand = pv[j] + 1
            if cand < best:
                best = cand
            cand = cv[j - 1] + 1
            if cand < best:
                best = cand
            cv[j] = best
        tmp = pv
        pv = cv
        cv = tmp
    return int(pv[m])
