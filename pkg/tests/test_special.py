import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from vofrac.special import MittagLefflerError, gamma, mittag_leffler


@pytest.mark.parametrize("x", [1.0, 2.0, 3.0, 10.0])
def test_gamma_integers_exact(x):
    assert gamma(x) == math.factorial(int(x) - 1)


def test_gamma_half_is_sqrt_pi():
    assert gamma(0.5) == pytest.approx(1.7724538509055159, rel=1e-14)


@pytest.mark.parametrize("x", np.concatenate([np.geomspace(1e-4, 1, 25), np.linspace(1.01, 30, 60)]))
def test_gamma_against_high_precision(x):
    with mpmath.workdps(40):
        ref = float(mpmath.gamma(mpmath.mpf(float(x))))
    assert gamma(x) == pytest.approx(ref, rel=1e-10)


def test_gamma_recurrence_dense():
    for x in np.linspace(0.1, 20.0, 2000):
        assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-9)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, 171.0, 200.0])
def test_gamma_domain(x):
    with pytest.raises((ValueError, OverflowError)):
        gamma(x)


def test_gamma_near_upper_limit_finite():
    assert math.isfinite(gamma(170.5))


def test_ml_reduces_to_exp():
    r = mittag_leffler(1.0, 1.0)
    assert r.value == pytest.approx(math.e, abs=1e-10)
    assert r.truncation_bound <= 1e-15


def test_ml_at_zero():
    for a in (0.1, 0.5, 1.0):
        r = mittag_leffler(a, 0.0)
        assert r.value == 1.0 and r.terms_used == 1


def test_ml_half_against_erfc_oracle():
    # E_{1/2}(-x) = exp(x^2) erfc(x)
    for x in (0.25, 1.0, 2.0):
        oracle = math.exp(x * x) * math.erfc(x)
        assert mittag_leffler(0.5, -x).value == pytest.approx(oracle, rel=1e-9)
    assert mittag_leffler(0.5, -1.0).value == pytest.approx(0.4275836, abs=1e-7)


def test_ml_against_mpmath_series():
    for alpha, z in [(0.8, -1.0), (0.3, -2.0), (0.9, 3.0), (0.6, -4.0)]:
        with mpmath.workdps(50):
            ref = mpmath.nsum(lambda k: mpmath.mpf(z) ** k / mpmath.gamma(alpha * k + 1), [0, mpmath.inf])
        assert mittag_leffler(alpha, z).value == pytest.approx(float(ref), rel=1e-8)


@given(st.floats(-5, 5))
def test_ml_alpha_one_is_exp(z):
    assert mittag_leffler(1.0, z).value == pytest.approx(math.exp(z), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 0.95, 1.0])
def test_ml_relaxation_monotone(alpha):
    ts = np.linspace(0.0, 3.0, 61)
    vals = [mittag_leffler(alpha, -(t**alpha)).value for t in ts]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_ml_term_cap():
    with pytest.raises(MittagLefflerError):
        mittag_leffler(0.05, 0.9, max_terms=5)


def test_ml_cancellation_is_reported():
    # terms peak near 1e15 while the sum is about 0.047
    with pytest.raises(MittagLefflerError, match="cancellation"):
        mittag_leffler(0.6, -10.0)


def test_ml_large_positive_overflow_is_explicit():
    with pytest.raises(OverflowError, match="overflow"):
        mittag_leffler(0.05, 40.0)


def test_ml_rejects_bad_alpha():
    for a in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            mittag_leffler(a, 1.0)
