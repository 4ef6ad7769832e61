"""Tropical polynomials over a fixed exponent set."""

from dataclasses import dataclass
import itertools

import numpy as np

from . import _kernels
from .semiring import NEG_INF, ShapeError, chebyshev_solution, check_trop, maxplus_mvp


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ExponentSet:
    """Finite set of exponent vectors in Z^n_{>=0}.

    Either a grid ``{0..d_1} x ... x {0..d_n}`` or an explicit list.  Grids
    are enumerated lexicographically with the last coordinate fastest; this
    order is also the coefficient order of every polynomial and model file.
    """

    n: int
    degrees: tuple = None
    explicit: tuple = None

    @classmethod
    def grid(cls, degrees):
        if np.isscalar(degrees):
            degrees = (degrees,)
        degrees = tuple(int(d) for d in degrees)
        if not degrees or any(d < 0 for d in degrees):
            raise ValueError(f"grid degrees must be nonnegative, got {degrees}")
        return cls(n=len(degrees), degrees=degrees)

    @classmethod
    def from_list(cls, exponents):
        rows = tuple(tuple(int(v) for v in np.atleast_1d(e)) for e in exponents)
        if not rows:
            raise ValueError("exponent list is empty")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("exponent vectors have mixed lengths")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("exponents must be nonnegative")
        if len(set(rows)) != len(rows):
            raise ValueError("duplicate exponents")
        return cls(n=n, explicit=rows)

    @property
    def is_grid(self):
        return self.degrees is not None

    def __len__(self):
        if self.is_grid:
            return int(np.prod([d + 1 for d in self.degrees]))
        return len(self.explicit)

    def array(self):
        """Exponents as a ``(|W|, n)`` integer array in canonical order."""
        if self.is_grid:
            rows = itertools.product(*(range(d + 1) for d in self.degrees))
            return np.array(list(rows), dtype=np.int64).reshape(-1, self.n)
        return np.array(self.explicit, dtype=np.int64)

    def index_of(self, w):
        w = tuple(int(v) for v in w)
        if self.is_grid:
            if len(w) != self.n or any(not 0 <= a <= d for a, d in zip(w, self.degrees)):
                return None
            idx = 0
            for a, d in zip(w, self.degrees):
                idx = idx * (d + 1) + a
            return idx
        try:
            return self.explicit.index(w)
        except ValueError:
            return None


@dataclass
class TropicalPolynomial:
    """``p(x) = max_w (w.x + coeffs[w])`` with coefficients in R u {-inf}."""

    exponents: ExponentSet
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = check_trop(self.coeffs, "coefficients").reshape(-1)
        if self.coeffs.shape[0] != len(self.exponents):
            raise ShapeError(
                f"{self.coeffs.shape[0]} coefficients for {len(self.exponents)} exponents")

    def __call__(self, points):
        return eval_stream(self, points)


def as_points(points, n):
    """Coerce ``points`` to a finite ``(N, n)`` float array."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        x = x.reshape(-1, 1) if n == 1 else x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != n:
        raise ShapeError(f"points of shape {np.shape(points)} do not match dimension {n}")
    if not np.isfinite(x).all():
        raise ValueError("points must be finite")
    return np.ascontiguousarray(x)


def build_design_matrix(points, W):
    """Tropical Vandermonde matrix, ``X[i, w] = w . x_i``."""
    x = as_points(points, W.n)
    return x @ W.array().T.astype(np.float64)


def _require_finite_coeff(p):
    if not np.isfinite(p.coeffs).any():
        raise EvaluationError("polynomial has no finite coefficient")


def eval_naive(p, points):
    _require_finite_coeff(p)
    return maxplus_mvp(build_design_matrix(points, p.exponents), p.coeffs)


def eval_stream(p, points):
    """Evaluate without forming the design matrix (grid exponent sets only).

    Explicit exponent lists go through :func:`eval_naive`.
    """
    _require_finite_coeff(p)
    W = p.exponents
    if not W.is_grid:
        return eval_naive(p, points)
    x = as_points(points, W.n)
    return _kernels.grid_eval(x, np.array(W.degrees, dtype=np.int64), p.coeffs)


def top_two(p, points):
    """Best and runner-up monomial values at each point."""
    _require_finite_coeff(p)
    W = p.exponents
    x = as_points(points, W.n)
    if W.is_grid:
        return _kernels.grid_top2(x, np.array(W.degrees, dtype=np.int64), p.coeffs)
    terms = build_design_matrix(x, W) + p.coeffs[None, :]
    if terms.shape[1] == 1:
        return terms[:, 0], np.full(len(x), NEG_INF)
    part = -np.partition(-terms, 1, axis=1)
    return part[:, 0], part[:, 1]


def _fit(x, target, W):
    """Closed-form l-inf fit on validated inputs.

    Returns ``(coeffs, err, fitted)`` where ``fitted`` are the values of the
    fitted polynomial at ``x``.
    """
    if W.is_grid:
        degrees = np.array(W.degrees, dtype=np.int64)
        u_hat = _kernels.grid_subsolution(x, degrees, target)
        v = _kernels.grid_eval(x, degrees, u_hat)
        err = 0.5 * float(np.max(np.abs(v - target)))
        return u_hat + err, err, v + err
    X = build_design_matrix(x, W)
    coeffs, err = chebyshev_solution(X, target)
    return coeffs, err, maxplus_mvp(X, coeffs)


def fit_polynomial_linf(points, y, W):
    """Best l-inf tropical polynomial with exponents in ``W``.

    Returns ``(p, err)`` with ``err = max_i |p(x_i) - y_i|`` the global
    minimum over all coefficient vectors.
    """
    x = as_points(points, W.n)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    if y.shape[0] != x.shape[0]:
        raise ShapeError(f"{x.shape[0]} points but {y.shape[0]} targets")
    if not np.isfinite(y).all():
        raise ValueError("targets must be finite")
    coeffs, err, _ = _fit(x, y, W)
    return TropicalPolynomial(W, coeffs), err
