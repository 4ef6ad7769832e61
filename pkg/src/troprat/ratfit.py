"""Alternating minimisation over tropical rational functions.

Each half-step is a closed-form l-inf tropical polynomial fit: the numerator
is refit to ``q(x) + y`` with the denominator frozen, then the denominator is
refit to ``p(x) - y``.  The training error never increases.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .poly import (ExponentSet, TropicalPolynomial, _fit, as_points, eval_stream,
                   top_two)
from .semiring import NEG_INF


@dataclass
class TropicalRational:
    """``f(x) = p(c x) - q(c x)`` with ``p``, ``q`` over one exponent set."""

    p: TropicalPolynomial
    q: TropicalPolynomial
    scale_c: float = 1.0

    def __post_init__(self):
        if self.p.exponents != self.q.exponents:
            raise ValueError("numerator and denominator use different exponent sets")
        if not (np.isfinite(self.scale_c) and self.scale_c > 0):
            raise ValueError(f"scale_c must be finite and positive, got {self.scale_c}")

    @property
    def exponents(self):
        return self.p.exponents

    def __call__(self, points):
        x = as_points(points, self.exponents.n) * self.scale_c
        return eval_stream(self.p, x) - eval_stream(self.q, x)


@dataclass
class FitConfig:
    k_max: int = 1000
    eta_tol: float = 1e-12
    scale_c: float = 1.0
    record_trace: bool = True
    initial_coeffs: Optional[tuple] = None

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if not self.eta_tol >= 0:
            raise ValueError("eta_tol must be nonnegative")


@dataclass
class IterRecord:
    k: int
    e: float
    eta: Optional[float]


@dataclass
class FitTrace:
    """Loss ``e`` and update norm ``eta`` per iteration.

    ``e0`` is the error of the initial model; ``eta`` at iteration k is the
    sup-norm change of the stacked ``(p, q)`` coefficients from k-1 to k and
    is ``None`` for k = 1.
    """

    e0: float
    records: list = field(default_factory=list)
    termination: str = "kmax-reached"

    @property
    def iterations(self):
        return len(self.records)

    @property
    def e_final(self):
        return self.records[-1].e if self.records else self.e0


def _data(points, y, n):
    x = as_points(points, n)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape[0] == 0:
        raise ValueError("empty dataset")
    if y.shape[0] != x.shape[0]:
        raise ValueError(f"{x.shape[0]} points but {y.shape[0]} targets")
    if not np.isfinite(y).all():
        raise ValueError("targets must be finite")
    return x, y


def update_numerator(q, points, y, W=None):
    """Optimal numerator for a fixed denominator."""
    W = W or q.exponents
    x, y = _data(points, y, W.n)
    coeffs, _, _ = _fit(x, eval_stream(q, x) + y, W)
    return TropicalPolynomial(W, coeffs)


def update_denominator(p, points, y, W=None):
    """Optimal denominator for a fixed numerator."""
    W = W or p.exponents
    x, y = _data(points, y, W.n)
    coeffs, _, _ = _fit(x, eval_stream(p, x) - y, W)
    return TropicalPolynomial(W, coeffs)


def _initial(W, y, cfg):
    if cfg.initial_coeffs is not None:
        p0, q0 = (np.array(c, dtype=np.float64).reshape(-1) for c in cfg.initial_coeffs)
        if p0.shape[0] != len(W) or q0.shape[0] != len(W):
            raise ValueError("initial coefficients do not match the exponent set")
        return p0, q0
    zero = W.index_of((0,) * W.n)
    if zero is None:
        raise ValueError("default initialisation needs the zero exponent in W")
    p0 = np.full(len(W), NEG_INF)
    q0 = np.full(len(W), NEG_INF)
    q0[zero] = -np.mean(y)
    return p0, q0


def alternating_fit(points, y, W, cfg=None):
    """Fit ``f = p - q`` with exponents ``W`` by alternating l-inf fits.

    Stops after ``cfg.k_max`` iterations or as soon as the update norm drops
    to ``cfg.eta_tol`` (checked from the second iteration on).  Inputs are
    multiplied by ``cfg.scale_c`` before fitting.

    Returns ``(model, trace)``.
    """
    cfg = cfg or FitConfig()
    x, y = _data(points, y, W.n)
    x = x * cfg.scale_c
    p, q = _initial(W, y, cfg)

    if cfg.initial_coeffs is None:
        # The initial model is the constant mean(y); p0 = -inf is never evaluated.
        e0 = float(np.max(np.abs(y - np.mean(y))))
        q_vals = np.full(len(y), -np.mean(y))
    else:
        q_vals = eval_stream(TropicalPolynomial(W, q), x)
        e0 = float(np.max(np.abs(eval_stream(TropicalPolynomial(W, p), x) - q_vals - y)))

    trace = FitTrace(e0=e0)
    for k in range(1, cfg.k_max + 1):
        p_new, _, p_vals = _fit(x, q_vals + y, W)
        q_new, _, q_vals = _fit(x, p_vals - y, W)
        e = float(np.max(np.abs(p_vals - q_vals - y)))
        eta = None
        if k > 1:
            eta = float(max(np.max(np.abs(p_new - p)), np.max(np.abs(q_new - q))))
        p, q = p_new, q_new
        if cfg.record_trace or k == 1:
            trace.records.append(IterRecord(k, e, eta))
        else:
            trace.records[-1] = IterRecord(k, e, eta)
        if eta is not None and eta <= cfg.eta_tol:
            trace.termination = "tol-reached"
            break

    model = TropicalRational(TropicalPolynomial(W, p), TropicalPolynomial(W, q), cfg.scale_c)
    return model, trace


def loss(model, points, y):
    """``max_i |f(x_i) - y_i|``."""
    x, y = _data(points, y, model.exponents.n)
    return float(np.max(np.abs(model(x) - y)))


def relative_error(model, points, y):
    """``||f(X) - y||_inf / ||y||_inf``; plain error when ``y`` is all zero."""
    y = np.asarray(y, dtype=np.float64)
    scale = np.max(np.abs(y))
    err = loss(model, points, y)
    return err / scale if scale > 0 else err


@dataclass
class Certificate:
    loss: float
    tol: float
    on_hypersurface: list
    attaining_points: list

    @property
    def holds(self):
        return bool(self.on_hypersurface) or len(self.attaining_points) >= 2


def certificate(model, points, y, tol=None):
    """Data-level evidence that the loss is nondifferentiable at ``model``.

    ``on_hypersurface`` lists points where the max in ``p`` or ``q`` is
    attained by two or more monomials (within ``tol``); ``attaining_points``
    lists points whose absolute residual is within ``tol`` of the loss.
    """
    x, y = _data(points, y, model.exponents.n)
    if tol is None:
        tol = 1e-9 * (1.0 + float(np.max(np.abs(y))))
    xs = x * model.scale_c
    tied = np.zeros(len(y), dtype=bool)
    for poly in (model.p, model.q):
        best, second = top_two(poly, xs)
        tied |= best - second <= tol
    resid = np.abs(eval_stream(model.p, xs) - eval_stream(model.q, xs) - y)
    worst = float(np.max(resid))
    return Certificate(
        loss=worst,
        tol=tol,
        on_hypersurface=np.flatnonzero(tied).tolist(),
        attaining_points=np.flatnonzero(resid >= worst - tol).tolist(),
    )
