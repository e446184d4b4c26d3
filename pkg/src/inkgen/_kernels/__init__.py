"""Kernel dispatch: compiled Cython extension with a numpy fallback.

The compiled module ``inkgen._kernels._ck`` is selected when it imported
successfully and ``INKGEN_PURE`` is unset; otherwise the numpy
implementations in ``np_impl`` are used.  Both expose the same functions
with identical semantics; ``HAVE_EXT`` records which path is live.

Set ``INKGEN_PURE=1`` before import to force the numpy path (used by the
parity tests and the kernel benchmark).
"""

import os

from inkgen._kernels import np_impl

HAVE_EXT = False
_impl = np_impl

if not os.environ.get("INKGEN_PURE"):
    try:
        from inkgen._kernels import _ck as _impl  # type: ignore[no-redef]

        HAVE_EXT = True
    except ImportError:
        _impl = np_impl

softmax = _impl.softmax
softmax_grad = _impl.softmax_grad
logsumexp = _impl.logsumexp
logsumexp_grad = _impl.logsumexp_grad
layernorm = _impl.layernorm
layernorm_grad = _impl.layernorm_grad
gelu = _impl.gelu
gelu_grad = _impl.gelu_grad
levenshtein = _impl.levenshtein
