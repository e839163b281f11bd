"""Convolution weights and normalization functions of the fractional schemes.

For a step n -> n+1 and history node m, the lag is ``N = n - m``. The pair
of weights integrates the two-point interpolant of the right-hand side
against the power-law kernel over [t_m, t_{m+1}]:

    e1 = h^(psi+1) * ((N+1)^psi (N+2+psi) - N^psi (N+2+2 psi)) / (psi (psi+1))
    e2 = h^(psi+1) * ((N+1)^(psi+1) - N^psi (N+1+psi)) / (psi (psi+1))

with 0^psi taken as 0.
"""

import numpy as np

from ._backend import maybe_njit
from .special import gamma


_SERIES_LAG = 8
_SERIES_TERMS = 24


@maybe_njit(cache=True)
def _expm1_minus_x(x):
    # e^x - 1 - x for 0 <= x <= 0.12
    term = 0.5 * x * x
    total = term
    for k in range(3, 40):
        term *= x / k
        total += term
        if term <= 1e-18 * total:
            break
    return total


@maybe_njit(cache=True)
def _log1p_minus_u(u):
    # log(1+u) - u for 0 < u <= 1/8
    power = -u * u  # (-1)^(k+1) u^k at k = 2
    total = 0.5 * power
    for k in range(3, 60):
        power *= -u
        term = power / k
        total += term
        if abs(term) <= 1e-18 * abs(total):
            break
    return total


@maybe_njit(cache=True)
def _brackets(psi, lag):
    """Bracketed parts of (e1, e2), i.e. the weights without h^(psi+1)/(psi(psi+1)).

    The direct form subtracts two terms of size lag^(1+psi) to get a result
    of size lag^(psi-1); from lag 8 on the difference is rewritten with
    u = 1/lag and series for the small remainders so no digits cancel.
    """
    if psi == 1.0:
        return 3.0, 1.0
    n = float(lag)
    if lag < _SERIES_LAG:
        tail = n**psi if lag > 0 else 0.0
        b1 = (n + 1.0) ** psi * (n + 2.0 + psi) - tail * (n + 2.0 + 2.0 * psi)
        b2 = (n + 1.0) ** (psi + 1.0) - tail * (n + 1.0 + psi)
        return b1, b2
    u = 1.0 / n
    log_ratio = np.log1p(u)
    grow = np.expm1(psi * log_ratio)  # (1 + 1/n)^psi - 1
    # n * grow - psi, free of cancellation
    core = (_expm1_minus_x(psi * log_ratio) + psi * _log1p_minus_u(u)) / u
    lead = n**psi
    return lead * (core + (2.0 + psi) * grow), lead * (core + grow)


@maybe_njit(cache=True)
def _e1(psi, lag, h):
    return h ** (psi + 1.0) / (psi * (psi + 1.0)) * _brackets(psi, lag)[0]


@maybe_njit(cache=True)
def _e2(psi, lag, h):
    return h ** (psi + 1.0) / (psi * (psi + 1.0)) * _brackets(psi, lag)[1]


def bracket_tables(psi, n_lags):
    """Vectorized :func:`_brackets` for lags 0..n_lags-1."""
    if psi == 1.0:
        return np.full(n_lags, 3.0), np.full(n_lags, 1.0)
    lags = np.arange(n_lags, dtype=float)
    b1 = np.empty(n_lags)
    b2 = np.empty(n_lags)
    k = min(n_lags, _SERIES_LAG)
    small = lags[:k]
    tail = small**psi
    b1[:k] = (small + 1.0) ** psi * (small + 2.0 + psi) - tail * (small + 2.0 + 2.0 * psi)
    b2[:k] = (small + 1.0) ** (psi + 1.0) - tail * (small + 1.0 + psi)
    if n_lags > k:
        n = lags[k:]
        u = 1.0 / n
        log_ratio = np.log1p(u)
        x = psi * log_ratio
        grow = np.expm1(x)
        # fixed-length series; both converge below 1e-18 relative for u <= 1/8
        term = 0.5 * x * x
        em = term.copy()
        for j in range(3, _SERIES_TERMS):
            term = term * x / j
            em += term
        power = -u * u
        lm = 0.5 * power
        for j in range(3, _SERIES_TERMS):
            power = power * -u
            lm += power / j
        core = (em + psi * lm) / u
        lead = n**psi
        b1[k:] = lead * (core + (2.0 + psi) * grow)
        b2[k:] = lead * (core + grow)
    return b1, b2


def _check_psi(psi, low_open=True):
    psi = float(psi)
    ok = (0.0 < psi <= 1.0) if low_open else (0.0 <= psi <= 1.0)
    if not ok:
        interval = "(0, 1]" if low_open else "[0, 1]"
        raise ValueError(f"order psi must lie in {interval}, got {psi!r}")
    return psi


def _check_lag_h(lag, h):
    if int(lag) != lag or lag < 0:
        raise ValueError(f"lag must be a non-negative integer, got {lag!r}")
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h!r}")


def weight_e1(psi, lag, h):
    """Weight multiplying F_m in the history sum."""
    psi = _check_psi(psi)
    _check_lag_h(lag, h)
    return float(_e1(psi, int(lag), float(h)))


def weight_e2(psi, lag, h):
    """Weight multiplying F_{m-1} in the history sum."""
    psi = _check_psi(psi)
    _check_lag_h(lag, h)
    return float(_e2(psi, int(lag), float(h)))


def weight_tables(psi, n_lags, h):
    """Both weights for lags 0..n_lags-1 at a fixed order, as float arrays."""
    psi = _check_psi(psi)
    b1, b2 = bracket_tables(psi, n_lags)
    scale = h ** (psi + 1.0) / (psi * (psi + 1.0))
    return scale * b1, scale * b2


def norm_ab(psi):
    """Atangana-Baleanu normalization B(psi) = 1 - psi + psi / Gamma(psi)."""
    psi = _check_psi(psi)
    return 1.0 - psi + psi / gamma(psi)


def norm_cf(psi):
    """Caputo-Fabrizio normalization 2 / (2 - psi), defined on [0, 1]."""
    psi = _check_psi(psi, low_open=False)
    return 2.0 / (2.0 - psi)


def cf_coefficients(psi, normalization="paper"):
    """(jump, integral) coefficients of the Caputo-Fabrizio step.

    ``paper``: ((2-psi)(1-psi)/2, psi(2-psi)/2). ``unit``: (1-psi, psi),
    which reduces to the classical two-step method at psi = 1.
    """
    psi = _check_psi(psi)
    if normalization == "paper":
        return (2.0 - psi) * (1.0 - psi) / 2.0, psi * (2.0 - psi) / 2.0
    if normalization == "unit":
        return 1.0 - psi, psi
    raise ValueError(f"unknown CF normalization {normalization!r}")


def lc_prefactor(psi):
    return 1.0 / gamma(_check_psi(psi))


def abc_prefactors(psi):
    """(local, history) multipliers for the ABC step: (1-psi)/B and psi/(B Gamma(psi))."""
    psi = _check_psi(psi)
    b = norm_ab(psi)
    return (1.0 - psi) / b, psi / (b * gamma(psi))


__all__ = [
    "weight_e1",
    "weight_e2",
    "weight_tables",
    "bracket_tables",
    "norm_ab",
    "norm_cf",
    "cf_coefficients",
    "lc_prefactor",
    "abc_prefactors",
]
