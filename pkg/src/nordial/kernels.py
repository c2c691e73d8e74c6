"""Hot numeric loops for SVM training, JIT-compiled when numba is available.

The Pegasos-style subgradient descent visits one example at a time with
sequentially dependent updates, so it cannot be vectorized; it is the one
genuinely hot loop in the package. Set NORDIAL_NUMBA=0 to force the pure
NumPy fallback (also used automatically when numba is not importable).
Both paths run the identical update schedule and agree to float rounding;
see benchmarks/bench_kernels.py for a timing comparison.

Documents are passed as CSR triples (data, indices, indptr) with labels
y in {-1.0, +1.0} and a precomputed (epochs, n) matrix of visit orders,
so the kernel itself is free of RNG state.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_enabled() -> bool:
    return os.environ.get("NORDIAL_NUMBA", "1").strip().lower() not in ("0", "false", "no")


def _pegasos_loop(data, indices, indptr, y, lam, orders, n_features):
    # Weights are kept as scale * v so regularization shrinkage costs O(1)
    # per step instead of O(n_features).
    n_epochs, n = orders.shape
    v = np.zeros(n_features)
    scale = 1.0
    b = 0.0
    obj = np.zeros(n_epochs)
    t = 0
    for e in range(n_epochs):
        for k in range(n):
            i = orders[e, k]
            t += 1
            eta = 1.0 / (lam * t)
            dot = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                dot += v[indices[p]] * data[p]
            margin = y[i] * (scale * dot + b)
            if t > 1:
                # (1 - eta*lam) with eta = 1/(lam*t) is exactly 1 - 1/t;
                # at t == 1 the factor is 0 and v is still the zero vector.
                scale *= 1.0 - 1.0 / t
            if margin < 1.0:
                coef = eta * y[i] / scale
                for p in range(indptr[i], indptr[i + 1]):
                    v[indices[p]] += coef * data[p]
                b += eta * y[i]
        wnorm2 = 0.0
        for j in range(n_features):
            wnorm2 += v[j] * v[j]
        wnorm2 *= scale * scale
        hinge = 0.0
        for i in range(n):
            dot = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                dot += v[indices[p]] * data[p]
            slack = 1.0 - y[i] * (scale * dot + b)
            if slack > 0.0:
                hinge += slack
        obj[e] = 0.5 * lam * wnorm2 + hinge / n
    return scale * v, b, obj


def pegasos_numpy(data, indices, indptr, y, lam, orders, n_features):
    """Pure NumPy path: same schedule as the jitted loop, row ops vectorized."""
    n_epochs, n = orders.shape
    v = np.zeros(n_features)
    scale = 1.0
    b = 0.0
    obj = np.zeros(n_epochs)
    t = 0
    for e in range(n_epochs):
        for k in range(n):
            i = orders[e, k]
            t += 1
            eta = 1.0 / (lam * t)
            row = slice(indptr[i], indptr[i + 1])
            idx = indices[row]
            vals = data[row]
            margin = y[i] * (scale * float(v[idx] @ vals) + b)
            if t > 1:
                scale *= 1.0 - 1.0 / t
            if margin < 1.0:
                v[idx] += (eta * y[i] / scale) * vals
                b += eta * y[i]
        prods = np.empty(n)
        for i in range(n):
            row = slice(indptr[i], indptr[i + 1])
            prods[i] = v[indices[row]] @ data[row]
        hinge = np.maximum(0.0, 1.0 - y * (scale * prods + b))
        obj[e] = 0.5 * lam * scale * scale * float(v @ v) + float(hinge.mean())
    return scale * v, b, obj


pegasos_jit = None
if _numba_enabled():
    try:
        import numba

        pegasos_jit = numba.njit(cache=True, nogil=True)(_pegasos_loop)
    except ImportError:
        pegasos_jit = None

USING_NUMBA = pegasos_jit is not None

pegasos = pegasos_jit if USING_NUMBA else pegasos_numpy


def using_numba() -> bool:
    """True when the active kernel path is the numba-compiled one."""
    return USING_NUMBA
