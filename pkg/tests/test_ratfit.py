import math

import numpy as np
import pytest

from troprat.poly import ExponentSet, TropicalPolynomial, build_design_matrix, eval_naive
from troprat.ratfit import (FitConfig, TropicalRational, alternating_fit, certificate, loss,
                            relative_error, update_denominator, update_numerator)

NI = -math.inf
W0 = ExponentSet.grid([0])
W1 = ExponentSet.grid([1])


def poly(W, c):
    return TropicalPolynomial(W, c)


def test_update_numerator_examples():
    assert update_numerator(poly(W0, [-5]), [0.0], [5.0]).coeffs.tolist() == [0.0]
    p = update_numerator(poly(W1, [-1, NI]), [0, 1, 2], [0, 1, 2])
    assert p.coeffs.tolist() == [-1.0, -1.0]
    assert update_numerator(poly(W0, [0]), [4.0], [0.0]).coeffs.tolist() == [0.0]


def test_update_denominator_examples():
    assert update_denominator(poly(W0, [0]), [0.0], [5.0]).coeffs.tolist() == [-5.0]
    q = update_denominator(poly(W1, [-1, -1]), [0, 1, 2], [0, 1, 2])
    assert q.coeffs.tolist() == [-1.0, -3.0]


def test_update_denominator_zero_case():
    rng = np.random.default_rng(0)
    W = ExponentSet.grid([2])
    p = poly(W, rng.uniform(-2, 2, 3))
    x = rng.uniform(-2, 2, 15)
    q = update_denominator(p, x, eval_naive(p, x))
    np.testing.assert_allclose(eval_naive(q, x), 0.0, atol=1e-12)


def test_alternating_fit_single_point():
    model, trace = alternating_fit([0.0], [5.0], W0)
    assert model.p.coeffs.tolist() == [0.0]
    assert model.q.coeffs.tolist() == [-5.0]
    assert trace.records[0].e == 0.0
    assert trace.records[0].eta is None
    assert trace.termination == "tol-reached"


def test_alternating_fit_line():
    model, trace = alternating_fit([0, 1, 2], [0, 1, 2], W1, FitConfig(k_max=1))
    assert model.p.coeffs.tolist() == [-1.0, -1.0]
    assert model.q.coeffs.tolist() == [-1.0, -3.0]
    assert trace.records[0].e == 0.0
    assert trace.e0 == 1.0
    assert trace.termination == "kmax-reached"


def test_default_init_needs_zero_exponent():
    W = ExponentSet.from_list([(1,), (2,)])
    with pytest.raises(ValueError):
        alternating_fit([0, 1], [0, 1], W)
    model, trace = alternating_fit([0, 1], [0, 1], W,
                                   FitConfig(initial_coeffs=([0, 0], [0, 0])))
    assert trace.e_final <= trace.e0


def test_empty_dataset():
    with pytest.raises(ValueError):
        alternating_fit(np.zeros((0, 1)), [], W1)


@pytest.mark.parametrize("model, y, expected", [
    (TropicalRational(poly(W0, [0]), poly(W0, [0])), [1.0, -2.0], 2.0),
    (TropicalRational(poly(W0, [1]), poly(W0, [0])), [0.0, 2.0], 1.0),
])
def test_loss_examples(model, y, expected):
    assert loss(model, [0.0, 1.0], y) == expected


def test_loss_of_exact_model():
    model, _ = alternating_fit([0, 1, 2], [0, 1, 2], W1)
    assert loss(model, [0, 1, 2], [0, 1, 2]) == 0.0


def test_scale_applied_to_inputs():
    f = TropicalRational(poly(W1, [0, 0]), poly(W1, [0, NI]), scale_c=2.0)
    # f(x) = max(0, 2x) - 0
    assert f([1.5, -1.0]).tolist() == [3.0, 0.0]


def _run(seed, n=None, N=None, degree=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 4))
    degree = degree if degree is not None else int(rng.integers(1, 5))
    N = N or int(rng.integers(5, 200))
    x = rng.uniform(-3, 3, (N, n))
    y = np.sin(x).sum(axis=1) + rng.normal(0, 0.3, N)
    W = ExponentSet.grid([degree] * n)
    return x, y, W


@pytest.mark.parametrize("seed", range(10))
def test_loss_nonincreasing_and_update_bound(seed):
    x, y, W = _run(seed)
    _, trace = alternating_fit(x, y, W, FitConfig(k_max=300))
    es = [trace.e0] + [r.e for r in trace.records]
    for a, b in zip(es, es[1:]):
        assert b <= a + 1e-12
    recs = trace.records
    for cur, nxt in zip(recs, recs[1:]):
        assert cur.e - nxt.e <= 2 * nxt.eta + 1e-12
        assert nxt.eta >= 0 and math.isfinite(nxt.eta)


@pytest.mark.parametrize("seed", range(5))
def test_half_step_optimal(seed):
    x, y, W = _run(seed, N=60)
    model, _ = alternating_fit(x, y, W, FitConfig(k_max=3))
    p = update_numerator(model.q, x, y)
    X = build_design_matrix(x, W)
    qv = eval_naive(model.q, x)

    def err(c):
        return np.max(np.abs(np.max(X + c, axis=1) - qv - y))

    base = err(p.coeffs)
    rng = np.random.default_rng(seed + 100)
    for _ in range(200):
        delta = rng.uniform(-1, 1, len(W))
        assert err(p.coeffs + delta) >= base - 1e-9


@pytest.mark.parametrize("c", [0.5, 1.3, 3.0])
def test_scale_consistency_bitwise(c):
    x, y, W = _run(42, n=2, N=80, degree=3)
    m1, t1 = alternating_fit(x, y, W, FitConfig(k_max=50, scale_c=c))
    m2, t2 = alternating_fit(x * c, y, W, FitConfig(k_max=50))
    assert m1.p.coeffs.tobytes() == m2.p.coeffs.tobytes()
    assert m1.q.coeffs.tobytes() == m2.q.coeffs.tobytes()
    assert m1.scale_c == c
    assert loss(m1, x, y) == pytest.approx(t1.e_final, abs=1e-12)


def test_all_coefficients_finite_after_fit():
    x, y, W = _run(3, n=2, degree=3)
    model, trace = alternating_fit(x, y, W, FitConfig(k_max=5))
    assert np.isfinite(model.p.coeffs).all() and np.isfinite(model.q.coeffs).all()


def test_trace_not_recorded():
    x, y, W = _run(4)
    _, trace = alternating_fit(x, y, W, FitConfig(k_max=20, record_trace=False))
    assert len(trace.records) == 1


def test_recovery_small():
    rng = np.random.default_rng(9)
    W = ExponentSet.grid([1, 1])
    truth = TropicalRational(poly(W, rng.uniform(-5, 5, 4)), poly(W, rng.uniform(-5, 5, 4)))
    x = rng.uniform(-5, 5, (300, 2))
    y = truth(x)
    model, _ = alternating_fit(x, y, W)
    assert relative_error(model, x, y) <= 1e-10


def test_certificate_tie_at_zero():
    f = TropicalRational(poly(W1, [0, 0]), poly(W1, [0, NI]))
    cert = certificate(f, [0.0], [0.0])
    assert cert.on_hypersurface == [0]


def test_certificate_attaining_points():
    # f = 0, y = [-1, 1, 0] gives residuals [1, -1, 0]
    f = TropicalRational(poly(W0, [0]), poly(W0, [0]))
    cert = certificate(f, [0.0, 1.0, 2.0], [-1.0, 1.0, 0.0])
    assert cert.attaining_points == [0, 1]
    assert cert.loss == 1.0
    assert cert.holds


def test_certificate_single_point_unique_argmax():
    f = TropicalRational(poly(W1, [0, -5]), poly(W1, [0, NI]))
    cert = certificate(f, [10.0], [1.0])
    assert cert.on_hypersurface == []
    assert cert.attaining_points == [0]
    assert not cert.holds


def test_fitted_iterates_carry_certificate():
    x, y, W = _run(8, n=1, N=50, degree=3)
    model, _ = alternating_fit(x, y, W, FitConfig(k_max=20))
    assert certificate(model, x, y).holds
