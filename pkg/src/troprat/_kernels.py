"""Matrix-free grid kernels.

Exponents of a grid ``{0..d_1} x ... x {0..d_n}`` are visited in
lexicographic order, last coordinate fastest.  The column ``u = X[:, w]`` is
never recomputed from scratch: ``levels[k]`` holds ``sum_{j<k} w_j x_j`` and
advancing coordinate ``j`` by one adds ``x_j`` to level ``j+1`` and resets
the deeper levels.  Working memory is ``(n + 1) * N`` floats.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _advance(w, degrees, levels, x):
    """Step ``w`` to the next grid exponent, updating ``levels`` in place.

    Returns False once the grid is exhausted.
    """
    n = w.shape[0]
    N = x.shape[0]
    j = n - 1
    while j >= 0 and w[j] == degrees[j]:
        j -= 1
    if j < 0:
        return False
    w[j] += 1
    for k in range(j + 1, n):
        w[k] = 0
    for i in range(N):
        levels[j + 1, i] += x[i, j]
    for k in range(j + 1, n):
        for i in range(N):
            levels[k + 1, i] = levels[k, i]
    return True


@njit(cache=True)
def grid_eval(x, degrees, coeffs):
    """Running maximum ``v = max(v, u_w + c_w)`` over the grid."""
    N, n = x.shape
    levels = np.zeros((n + 1, N))
    w = np.zeros(n, dtype=np.int64)
    v = np.full(N, -np.inf)
    k = 0
    while True:
        c = coeffs[k]
        if c != -np.inf:
            u = levels[n]
            for i in range(N):
                t = u[i] + c
                if t > v[i]:
                    v[i] = t
        k += 1
        if not _advance(w, degrees, levels, x):
            break
    return v


@njit(cache=True)
def grid_subsolution(x, degrees, target):
    """``u_hat_w = min_i (target_i - w.x_i)`` for every grid exponent."""
    N, n = x.shape
    size = 1
    for j in range(n):
        size *= degrees[j] + 1
    levels = np.zeros((n + 1, N))
    w = np.zeros(n, dtype=np.int64)
    out = np.empty(size)
    k = 0
    while True:
        u = levels[n]
        m = np.inf
        for i in range(N):
            t = target[i] - u[i]
            if t < m:
                m = t
        out[k] = m
        k += 1
        if not _advance(w, degrees, levels, x):
            break
    return out


@njit(cache=True)
def grid_top2(x, degrees, coeffs):
    """Largest and second-largest monomial value at every point."""
    N, n = x.shape
    levels = np.zeros((n + 1, N))
    w = np.zeros(n, dtype=np.int64)
    best = np.full(N, -np.inf)
    second = np.full(N, -np.inf)
    k = 0
    while True:
        c = coeffs[k]
        if c != -np.inf:
            u = levels[n]
            for i in range(N):
                t = u[i] + c
                if t > best[i]:
                    second[i] = best[i]
                    best[i] = t
                elif t > second[i]:
                    second[i] = t
        k += 1
        if not _advance(w, degrees, levels, x):
            break
    return best, second
