import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from vofrac import _loops
from vofrac.kernels import (
    abc_prefactors,
    cf_coefficients,
    norm_ab,
    norm_cf,
    weight_e1,
    weight_e2,
    weight_tables,
)
from vofrac.special import gamma


def quad_weights(psi, lag, h):
    """Kernel integrals over [t_m, t_{m+1}] with t_{n+1} = t_m + (lag+1) h."""
    tm, tn1 = 0.0, (lag + 1) * h
    kern = lambda t: (tn1 - t) ** (psi - 1.0)
    e1 = quad(lambda t: (t + h) * kern(t), tm, tm + h, limit=200)[0]
    e2 = quad(lambda t: (t - tm) * kern(t), tm, tm + h, limit=200)[0]
    return e1, e2


@pytest.mark.parametrize(
    "psi,lag,h",
    [(0.5, 0, 1.0), (0.5, 1, 1.0), (0.7, 3, 0.1), (0.3, 10, 0.5), (0.95, 40, 0.01), (1.0, 7, 0.2)],
)
def test_weights_match_quadrature(psi, lag, h):
    e1, e2 = quad_weights(psi, lag, h)
    assert weight_e1(psi, lag, h) == pytest.approx(e1, rel=1e-8)
    assert weight_e2(psi, lag, h) == pytest.approx(e2, rel=1e-8)


def test_weight_examples():
    assert weight_e1(1.0, 5, 0.01) == pytest.approx(1.5e-4, rel=1e-12)
    assert weight_e1(0.5, 0, 1.0) == pytest.approx(10 / 3, rel=1e-12)
    assert weight_e1(0.5, 1, 1.0) == pytest.approx(1.266330, abs=1e-6)
    assert weight_e2(1.0, 5, 0.01) == pytest.approx(5e-5, rel=1e-12)
    assert weight_e2(0.5, 0, 1.0) == pytest.approx(4 / 3, rel=1e-12)
    assert weight_e2(0.5, 1, 1.0) == pytest.approx(0.437903, abs=1e-6)


@pytest.mark.parametrize("lag", [0, 1, 10, 1000, 10**5])
def test_weights_at_order_one(lag):
    for h in (0.01, 0.3):
        assert weight_e1(1.0, lag, h) == pytest.approx(1.5 * h * h, rel=1e-12)
        assert weight_e2(1.0, lag, h) == pytest.approx(0.5 * h * h, rel=1e-12)


@pytest.mark.parametrize("psi", [0.0, -0.1, 1.01])
def test_weight_domain(psi):
    with pytest.raises(ValueError):
        weight_e1(psi, 0, 0.1)
    with pytest.raises(ValueError):
        weight_e2(psi, 0, 0.1)


def test_weight_bad_lag_or_step():
    with pytest.raises(ValueError):
        weight_e1(0.5, -1, 0.1)
    with pytest.raises(ValueError):
        weight_e2(0.5, 2, 0.0)


@settings(max_examples=200)
@given(st.floats(0.01, 1.0), st.integers(0, 10**5), st.floats(1e-4, 2.0))
def test_weights_positive(psi, lag, h):
    assert weight_e1(psi, lag, h) > 0
    assert weight_e2(psi, lag, h) > 0


@settings(max_examples=100)
@given(st.floats(0.01, 1.0), st.floats(1e-3, 1.0))
def test_fading_memory(psi, h):
    e1, _ = weight_tables(psi, 2000, h)
    tail = e1[1:]
    assert np.all(np.diff(tail) <= 1e-12 * tail[:-1])


def test_tables_agree_with_scalar_and_loop_buffers():
    psi, h, n = 0.63, 0.02, 300
    e1, e2 = weight_tables(psi, n, h)
    w1 = np.empty(n)
    w2 = np.empty(n)
    _loops._fill_weights_rev(psi, 0, n - 1, h, w1, w2)
    w1, w2 = w1[::-1], w2[::-1]
    for lag in (0, 1, 17, n - 1):
        assert e1[lag] == pytest.approx(weight_e1(psi, lag, h), rel=1e-13)
        assert e2[lag] == pytest.approx(weight_e2(psi, lag, h), rel=1e-13)
    np.testing.assert_allclose(w1 * h, e1, rtol=1e-13)
    np.testing.assert_allclose(w2 * h, e2, rtol=1e-13)


def test_order_one_weights_exactly_lag_independent():
    e1, e2 = weight_tables(1.0, 1000, 0.01)
    assert np.all(e1 == e1[0]) and np.all(e2 == e2[0])


def test_norm_ab():
    assert norm_ab(1.0) == 1.0
    assert norm_ab(0.5) == pytest.approx(0.5 + 0.5 / np.sqrt(np.pi), rel=1e-13)
    assert norm_ab(0.5) == pytest.approx(0.782095, abs=1e-6)
    assert norm_ab(0.9) == pytest.approx(0.1 + 0.9 / gamma(0.9), rel=1e-14)
    # high-precision value; 0.942203 is a common six-digit rounding slip
    assert norm_ab(0.9) == pytest.approx(0.9422008488215856, abs=1e-12)
    with pytest.raises(ValueError):
        norm_ab(0.0)


def test_norm_cf():
    assert norm_cf(0.0) == 1.0
    assert norm_cf(1.0) == 2.0
    assert norm_cf(0.5) == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        norm_cf(1.2)


def test_cf_coefficients():
    assert cf_coefficients(0.5) == (0.375, 0.375)
    assert cf_coefficients(1.0) == (0.0, 0.5)
    assert cf_coefficients(1.0, "unit") == (0.0, 1.0)
    with pytest.raises(ValueError):
        cf_coefficients(0.5, "other")


def test_abc_prefactors_at_one():
    assert abc_prefactors(1.0) == (0.0, 1.0)


def _mp_brackets(psi, lag, h):
    import mpmath as mp

    with mp.workdps(50):
        p, n, hh = mp.mpf(psi), mp.mpf(lag), mp.mpf(h)
        s = hh ** (p + 1) / (p * (p + 1))
        e1 = s * ((n + 1) ** p * (n + 2 + p) - n**p * (n + 2 + 2 * p))
        e2 = s * ((n + 1) ** (p + 1) - n**p * (n + 1 + p))
        return float(e1), float(e2)


@pytest.mark.parametrize("psi", [0.01, 0.3, 0.5, 0.8, 0.9999999999998, 1.0])
def test_weights_stable_for_large_lags(psi):
    lags = [0, 1, 5, 7, 8, 9, 50, 1000, 30000, 100000]
    t1, t2 = weight_tables(psi, 100001, 0.01)
    for lag in lags:
        r1, r2 = _mp_brackets(psi, lag, 0.01)
        for got, ref in ((weight_e1(psi, lag, 0.01), r1), (weight_e2(psi, lag, 0.01), r2), (t1[lag], r1), (t2[lag], r2)):
            assert got == pytest.approx(ref, rel=1e-11)
