"""Hot grid kernels: numba-accelerated with a pure-numpy fallback.

Set MORALBARGAIN_NO_NUMBA=1 in the environment to force the numpy path
(the fallback is also selected automatically when numba is missing).
Both paths perform identical arithmetic in identical order, so results
are bit-for-bit equal; `benchmarks/bench_kernels.py` compares speed.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_OFF = os.environ.get("MORALBARGAIN_NO_NUMBA", "").lower() in ("1", "true", "yes")
HAS_NUMBA = False
if not _ENV_OFF:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass


def grid_argmax_numpy(a, b, c, x1s, x2s):
    """Argmax of u[i,j] = a[i] + b[j] + c[i]*1{x1s[i] >= x2s[j]}.

    Ties break to the lowest x1, then lowest x2 (C-order first hit).
    Returns (i, j, u_max).
    """
    ind = x1s[:, None] >= x2s[None, :]
    u = a[:, None] + b[None, :] + np.where(ind, c[:, None], 0.0)
    k = int(np.argmax(u))
    i, j = divmod(k, u.shape[1])
    return i, j, float(u[i, j])


def deviation_best_numpy(pa, racc, c, x1s, x2s, y1, y2):
    """Best unilateral deviation utility against a fixed opponent (y1, y2).

    u[i,j] = pa[i]*1{x1s[i] >= y2} + racc*1{y1 >= x2s[j]}
             + c[i]*1{x1s[i] >= x2s[j]}
    Returns (u_max, i, j) with first-hit tie-breaking.
    """
    prop = np.where(x1s >= y2, pa, 0.0)
    resp = np.where(y1 >= x2s, racc, 0.0)
    u = prop[:, None] + resp[None, :] + np.where(x1s[:, None] >= x2s[None, :], c[:, None], 0.0)
    k = int(np.argmax(u))
    i, j = divmod(k, u.shape[1])
    return float(u[i, j]), i, j


if HAS_NUMBA:

    @njit(cache=True)
    def grid_argmax_numba(a, b, c, x1s, x2s):  # pragma: no cover - timed in benchmarks
        best_i = 0
        best_j = 0
        best_u = -np.inf
        for i in range(a.shape[0]):
            ai = a[i]
            ci = c[i]
            xi = x1s[i]
            for j in range(b.shape[0]):
                u = ai + b[j]
                if xi >= x2s[j]:
                    u += ci
                if u > best_u:
                    best_u = u
                    best_i = i
                    best_j = j
        return best_i, best_j, best_u

    @njit(cache=True)
    def deviation_best_numba(pa, racc, c, x1s, x2s, y1, y2):  # pragma: no cover
        best_u = -np.inf
        best_i = 0
        best_j = 0
        for i in range(x1s.shape[0]):
            base = pa[i] if x1s[i] >= y2 else 0.0
            for j in range(x2s.shape[0]):
                u = base
                if y1 >= x2s[j]:
                    u += racc
                if x1s[i] >= x2s[j]:
                    u += c[i]
                if u > best_u:
                    best_u = u
                    best_i = i
                    best_j = j
        return best_u, best_i, best_j

    grid_argmax = grid_argmax_numba
    deviation_best = deviation_best_numba
else:
    grid_argmax = grid_argmax_numpy
    deviation_best = deviation_best_numpy

USE_NUMBA = HAS_NUMBA
