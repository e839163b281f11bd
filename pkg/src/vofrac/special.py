"""Gamma and one-parameter Mittag-Leffler functions on the real line."""

import math
from dataclasses import dataclass

import numpy as np

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
GAMMA_MAX_ARG = 171.0


def gamma(x):
    """Gamma function for real ``0 < x < 171``.

    Arguments below 1/2 are shifted up with Gamma(x) = Gamma(x+1)/x, so no
    reflection formula is needed on the supported domain.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma: argument must be positive, got {x!r}")
    if x >= GAMMA_MAX_ARG:
        raise OverflowError(f"gamma: argument {x!r} overflows double precision")
    if x.is_integer():
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return _lanczos(x + 1.0) / x
    return _lanczos(x)


def _lanczos(x):
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, 9):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z+0.5) does not overflow before the product does
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * (half * math.exp(-t)) * half * acc


def gamma_array(values):
    """Elementwise :func:`gamma` over an array of arguments."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    flat_in = values.ravel()
    flat_out = out.ravel()
    cache = {}
    for i, v in enumerate(flat_in):
        g = cache.get(v)
        if g is None:
            g = cache[v] = gamma(v)
        flat_out[i] = g
    return out


_EPS = 2.0**-52


class MittagLefflerError(ArithmeticError):
    """Series evaluation failed to meet its tolerance within the term cap."""


@dataclass(frozen=True)
class MlSeriesReport:
    value: float
    terms_used: int
    truncation_bound: float


def mittag_leffler(alpha, z, tol=1e-15, max_terms=10_000, rtol_rounding=1e-9):
    """Sum E_alpha(z) = sum_k z**k / Gamma(alpha*k + 1) until the tail is below ``tol``.

    The tail bound is the first omitted term for z < 0 (alternating series
    with decreasing terms) and a geometric bound from the term ratio for
    z > 0. Both are only applied once the term magnitudes have started to
    decrease. ``tol`` is absolute.

    Plain double-precision summation: for z well below zero the partial sums
    cancel. When the rounding error implied by the largest term exceeds
    ``rtol_rounding`` relative to the result, MittagLefflerError is raised
    instead of returning a meaningless value.
    """
    alpha = float(alpha)
    z = float(z)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"mittag_leffler: alpha must lie in (0, 1], got {alpha!r}")
    if not tol > 0.0:
        raise ValueError("mittag_leffler: tol must be positive")
    if z == 0.0:
        return MlSeriesReport(1.0, 1, 0.0)

    log_abs_z = math.log(abs(z))
    negative = z < 0.0

    def magnitude(k):
        arg = alpha * k + 1.0
        if arg < 160.0 and k < 150:
            return abs(z) ** k / gamma(arg)
        try:
            return math.exp(k * log_abs_z - math.lgamma(arg))
        except OverflowError:
            raise OverflowError(
                f"mittag_leffler: series terms for alpha={alpha}, z={z} overflow"
            ) from None

    total = 1.0
    prev = 1.0
    peak = 1.0
    k = 1
    while k <= max_terms:
        mag = magnitude(k)
        peak = max(peak, mag)
        total += -mag if (negative and k % 2) else mag
        nxt = magnitude(k + 1)
        if nxt <= mag:
            if negative:
                bound = nxt
            else:
                ratio = nxt / mag if mag > 0.0 else 0.0
                bound = nxt / (1.0 - ratio) if ratio < 1.0 else math.inf
            if bound <= tol:
                if not math.isfinite(total):
                    raise OverflowError(f"mittag_leffler: E_{alpha}({z}) overflows")
                rounding = peak * _EPS * (k + 1)
                if rounding > rtol_rounding * abs(total):
                    raise MittagLefflerError(
                        f"mittag_leffler: cancellation for alpha={alpha}, z={z} "
                        f"(largest term {peak:.3e}, result {total:.3e})"
                    )
                return MlSeriesReport(total, k + 1, bound)
        prev = mag
        k += 1
    raise MittagLefflerError(
        f"mittag_leffler: no convergence for alpha={alpha}, z={z} "
        f"within {max_terms} terms (last term {prev:.3e})"
    )
