"""Max-plus / min-plus kernels over the extended reals R u {-inf}.

Tropical zero is IEEE ``-inf``; ``+inf`` and NaN are never valid inputs.
Reductions are plain max/min of single additions, so results do not depend
on reduction order.
"""

import numpy as np

NEG_INF = -np.inf


class ShapeError(ValueError):
    pass


class DegenerateColumnError(ValueError):
    """A column of all ``-inf`` entries has no finite residual."""


def check_trop(a, name="value"):
    """Return ``a`` as a float array, rejecting NaN and ``+inf``."""
    arr = np.asarray(a, dtype=np.float64)
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    if (arr == np.inf).any():
        raise ValueError(f"{name} contains +inf")
    return arr


def _matrix(A):
    A = check_trop(A, "matrix")
    if A.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def _check_cols(A, u):
    if u.ndim != 1 or A.shape[1] != u.shape[0]:
        raise ShapeError(f"matrix has {A.shape[1]} columns but vector has shape {u.shape}")


def maxplus_mvp(A, u):
    """``(A [max+] u)_i = max_j (A_ij + u_j)``."""
    A = _matrix(A)
    u = check_trop(u, "vector")
    _check_cols(A, u)
    return np.max(A + u[None, :], axis=1)


def minplus_mvp(A, u):
    """``(A [min+] u)_i = min_j (A_ij + u_j)``."""
    A = _matrix(A)
    u = check_trop(u, "vector")
    _check_cols(A, u)
    return np.min(A + u[None, :], axis=1)


def greatest_subsolution(A, b):
    """Largest ``u`` with ``A [max+] u <= b``, i.e. ``(-A^T) [min+] b``.

    Computed as ``u_j = min_i (b_i - A_ij)``; ``-inf`` entries of ``A`` impose
    no constraint on their column.
    """
    A = _matrix(A)
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ShapeError(f"matrix has {A.shape[0]} rows but rhs has shape {b.shape}")
    if not np.isfinite(b).all():
        raise ValueError("rhs must be finite")
    if A.shape[0] == 0:
        raise ShapeError("empty system")
    dead = np.all(A == NEG_INF, axis=0)
    if dead.any():
        raise DegenerateColumnError(f"columns {np.flatnonzero(dead).tolist()} are all -inf")
    with np.errstate(invalid="ignore"):
        return np.min(b[:, None] - A, axis=0)


def chebyshev_solution(A, b):
    """Minimise ``||A [max+] u - b||_inf`` in closed form.

    Returns ``(u, err)``: the greatest subsolution shifted up by half its
    residual norm, and the attained error.
    """
    u_hat = greatest_subsolution(A, b)
    b = np.asarray(b, dtype=np.float64)
    err = 0.5 * np.max(np.abs(maxplus_mvp(A, u_hat) - b))
    return u_hat + err, float(err)
