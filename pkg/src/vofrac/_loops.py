"""Time-stepping loops.

Each scheme has two implementations with the same contract:

* ``*_jit``: explicit loops compiled with numba, dispatching the right-hand
  side through :func:`vofrac.systems.rhs_by_code`;
* ``*_np``: an interpreted step loop whose history sums are numpy dot
  products, calling any Python ``rhs(t, x, p, out)``.

All loops fill a preallocated ``states`` array of shape (N+1, d) whose row 0
already holds the initial condition, and return the index of the first
diverged row or -1. Rows from the diverged index onward are set to NaN.
"""

import math

import numpy as np

from ._backend import maybe_njit
from .kernels import _brackets, bracket_tables
from .systems import rhs_by_code

DIVERGENCE_LIMIT = 1e8


@maybe_njit(cache=True)
def _row_diverged(row):
    for v in row:
        if not (abs(v) <= 1e8):
            return True
    return False


@maybe_njit(cache=True)
def _fill_weights_rev(psi, lo, hi, h, r1, r2):
    """Weights divided by h for lags lo..hi, stored reversed: lag j at index len-1-j."""
    top = r1.shape[0] - 1
    scale = h**psi / (psi * (psi + 1.0))
    for lag in range(lo, hi + 1):
        b1, b2 = _brackets(psi, lag)
        r1[top - lag] = scale * b1
        r2[top - lag] = scale * b2


def _fill_weights_np(psi, n, h):
    """Weights divided by h for lags 0..n."""
    b1, b2 = bracket_tables(psi, n + 1)
    scale = h**psi / (psi * (psi + 1.0))
    return scale * b1, scale * b2


@maybe_njit(cache=True, fastmath={"reassoc", "contract"})
def _sum_two(ra, rb, off, f, n):
    # sum_{m=1..n} ra[off+m] f[m] - rb[off+m] f[m-1]; contiguous, vectorizable
    s = 0.0
    for m in range(1, n + 1):
        s += ra[off + m] * f[m] - rb[off + m] * f[m - 1]
    return s


@maybe_njit(cache=True, fastmath={"reassoc", "contract"})
def _sum_diff(ra, off, f, n):
    s = 0.0
    for m in range(1, n + 1):
        s += ra[off + m] * (f[m] - f[m - 1])
    return s


@maybe_njit(cache=True, nogil=True)
def history_jit(code, p, t, x0, psi, local, coef, w1, w2, const_w, running, h, literal, zero_boot, states):
    """LC / ABC step X_{n+1} = X_0 + local[n] F_n + coef[n] * S_n.

    S_n is the two-weight history sum (reference) or the single-weight sum
    over F_m - F_{m-1} (literal). With ``const_w`` the lag tables ``w1``,
    ``w2`` (divided by h, lags 0..N-1) are used. Otherwise the table is
    extended by one lag per step and rebuilt only when psi[n+1] differs
    from the previous step's order. ``running`` marks lag-independent
    weights (psi = 1), where S_n is a running sum.
    """
    n_steps = states.shape[0] - 1
    d = states.shape[1]
    # F stored by component so each history sum runs over contiguous memory
    F = np.empty((d, n_steps + 1))
    f_row = np.empty(d)
    boot = np.zeros(d)
    acc = np.zeros(d)
    rhs_by_code(code, t[0], states[0], p, f_row)
    for i in range(d):
        F[i, 0] = f_row[i]
        if not zero_boot:
            boot[i] = f_row[i]
    # reversed tables: lag n - m sits at index (n_steps - 1 - n) + m
    if const_w:
        r1 = w1[:n_steps][::-1].copy()
        r2 = w2[:n_steps][::-1].copy()
    else:
        r1 = np.empty(n_steps)
        r2 = np.empty(n_steps)
    table_psi = -1.0
    filled = 0
    for n in range(n_steps):
        if running:
            for i in range(d):
                prev = boot[i] if n == 0 else F[i, n - 1]
                if literal:
                    acc[i] += w1[0] * (F[i, n] - prev)
                else:
                    acc[i] += w1[0] * F[i, n] - w2[0] * prev
        else:
            if not const_w:
                if psi[n + 1] != table_psi:
                    table_psi = psi[n + 1]
                    filled = 0
                _fill_weights_rev(table_psi, filled, n, h, r1, r2)
                filled = n + 1
            off = n_steps - 1 - n
            for i in range(d):
                f = F[i]
                if literal:
                    acc[i] = r1[off] * (f[0] - boot[i]) + _sum_diff(r1, off, f, n)
                else:
                    acc[i] = r1[off] * f[0] - r2[off] * boot[i] + _sum_two(r1, r2, off, f, n)
        for i in range(d):
            states[n + 1, i] = x0[i] + local[n] * F[i, n] + coef[n] * acc[i]
        if _row_diverged(states[n + 1]):
            states[n + 1 :, :] = np.nan
            return n + 1
        rhs_by_code(code, t[n + 1], states[n + 1], p, f_row)
        for i in range(d):
            F[i, n + 1] = f_row[i]
    return -1


def history_np(rhs, p, t, x0, psi, local, coef, w1, w2, const_w, running, h, literal, zero_boot, states):
    n_steps = states.shape[0] - 1
    d = states.shape[1]
    # Fx[0] is the bootstrap value F_{-1}; Fx[m+1] holds F_m
    Fx = np.zeros((n_steps + 2, d))
    rhs(t[0], states[0], p, Fx[1])
    if not zero_boot:
        Fx[0] = Fx[1]
    dF = None
    if literal:
        dF = np.empty((n_steps + 1, d))
        dF[0] = Fx[1] - Fx[0]
    s = np.zeros(d)
    table_psi = -1.0
    for n in range(n_steps):
        if not (const_w or running):
            # rebuild on a new order; grow by doubling while the order repeats
            if psi[n + 1] != table_psi:
                table_psi = psi[n + 1]
                w1, w2 = _fill_weights_np(table_psi, n, h)
            elif w1.size <= n:
                w1, w2 = _fill_weights_np(table_psi, min(n_steps - 1, 2 * n + 1), h)
        if running:
            if literal:
                s = s + w1[0] * dF[n]
            else:
                s = s + (w1[0] * Fx[n + 1] - w2[0] * Fx[n])
        elif literal:
            s = w1[n::-1] @ dF[: n + 1]
        else:
            s = w1[n::-1] @ Fx[1 : n + 2] - w2[n::-1] @ Fx[: n + 1]
        states[n + 1] = x0 + local[n] * Fx[n + 1] + coef[n] * s
        row = states[n + 1]
        if not np.all(np.abs(row) <= DIVERGENCE_LIMIT):
            states[n + 1 :] = np.nan
            return n + 1
        rhs(t[n + 1], row, p, Fx[n + 2])
        if literal:
            dF[n + 1] = Fx[n + 2] - Fx[n + 1]
    return -1


@maybe_njit(cache=True)
def _cf_pair(psi, unit_norm):
    if unit_norm:
        return 1.0 - psi, psi
    return (2.0 - psi) * (1.0 - psi) / 2.0, psi * (2.0 - psi) / 2.0


@maybe_njit(cache=True, nogil=True)
def cfc_jit(code, p, t, x0, psi, unit_norm, literal, zero_boot, h, states):
    """Caputo-Fabrizio step; only F_n and F_{n-1} are kept."""
    n_steps = states.shape[0] - 1
    d = states.shape[1]
    f_cur = np.empty(d)
    f_prev = np.zeros(d)
    rhs_by_code(code, t[0], states[0], p, f_cur)
    if not zero_boot:
        f_prev[:] = f_cur
    for n in range(n_steps):
        jump, integ = _cf_pair(psi[n + 1], unit_norm)
        for i in range(d):
            base = x0[i] if literal else states[n, i]
            states[n + 1, i] = (
                base
                + jump * (f_cur[i] - f_prev[i])
                + integ * h * (3.0 * f_cur[i] - f_prev[i]) / 2.0
            )
        if _row_diverged(states[n + 1]):
            states[n + 1 :, :] = np.nan
            return n + 1
        f_prev[:] = f_cur
        rhs_by_code(code, t[n + 1], states[n + 1], p, f_cur)
    return -1


def cfc_np(rhs, p, t, x0, psi, unit_norm, literal, zero_boot, h, states):
    n_steps = states.shape[0] - 1
    d = states.shape[1]
    f_cur = np.empty(d)
    f_prev = np.zeros(d)
    rhs(t[0], states[0], p, f_cur)
    if not zero_boot:
        f_prev[:] = f_cur
    for n in range(n_steps):
        jump, integ = _cf_pair.py_func(psi[n + 1], unit_norm)
        base = x0 if literal else states[n]
        states[n + 1] = base + jump * (f_cur - f_prev) + integ * h * (3.0 * f_cur - f_prev) / 2.0
        if not np.all(np.abs(states[n + 1]) <= DIVERGENCE_LIMIT):
            states[n + 1 :] = np.nan
            return n + 1
        f_prev, f_cur = f_cur, f_prev
        rhs(t[n + 1], states[n + 1], p, f_cur)
    return -1


@maybe_njit(cache=True)
def _rk4_step(code, p, t, x, h, k1, k2, k3, k4, tmp, out):
    d = x.shape[0]
    rhs_by_code(code, t, x, p, k1)
    for i in range(d):
        tmp[i] = x[i] + 0.5 * h * k1[i]
    rhs_by_code(code, t + 0.5 * h, tmp, p, k2)
    for i in range(d):
        tmp[i] = x[i] + 0.5 * h * k2[i]
    rhs_by_code(code, t + 0.5 * h, tmp, p, k3)
    for i in range(d):
        tmp[i] = x[i] + h * k3[i]
    rhs_by_code(code, t + h, tmp, p, k4)
    for i in range(d):
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@maybe_njit(cache=True, nogil=True)
def rk4_jit(code, p, t, h, states):
    n_steps = states.shape[0] - 1
    d = states.shape[1]
    k1, k2, k3, k4, tmp = np.empty(d), np.empty(d), np.empty(d), np.empty(d), np.empty(d)
    for n in range(n_steps):
        _rk4_step(code, p, t[n], states[n], h, k1, k2, k3, k4, tmp, states[n + 1])
        if _row_diverged(states[n + 1]):
            states[n + 1 :, :] = np.nan
            return n + 1
    return -1


def _rk4_step_np(rhs, p, t, x, h):
    k1, k2, k3, k4 = (np.empty_like(x) for _ in range(4))
    rhs(t, x, p, k1)
    rhs(t + 0.5 * h, x + 0.5 * h * k1, p, k2)
    rhs(t + 0.5 * h, x + 0.5 * h * k2, p, k3)
    rhs(t + h, x + h * k3, p, k4)
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_np(rhs, p, t, h, states):
    for n in range(states.shape[0] - 1):
        states[n + 1] = _rk4_step_np(rhs, p, t[n], states[n], h)
        if not np.all(np.abs(states[n + 1]) <= DIVERGENCE_LIMIT):
            states[n + 1 :] = np.nan
            return n + 1
    return -1


@maybe_njit(cache=True, nogil=True)
def lyapunov_jit(code, p, x0, h, n_steps, renorm_every, d0, discard_steps):
    """Two-trajectory rescaling estimate; returns (sum of log growth, counted time, status).

    status is 0 on success, 1 if the base trajectory diverged.
    """
    d = x0.shape[0]
    k1, k2, k3, k4, tmp = np.empty(d), np.empty(d), np.empty(d), np.empty(d), np.empty(d)
    x = x0.copy()
    y = np.empty(d)
    unit = 1.0 / math.sqrt(d)
    for i in range(d):
        y[i] = x0[i] + d0 * unit
    xn = np.empty(d)
    yn = np.empty(d)
    total = 0.0
    counted = 0.0
    for step in range(n_steps):
        t = step * h
        _rk4_step(code, p, t, x, h, k1, k2, k3, k4, tmp, xn)
        _rk4_step(code, p, t, y, h, k1, k2, k3, k4, tmp, yn)
        x[:] = xn
        y[:] = yn
        if _row_diverged(x):
            return total, counted, 1
        if (step + 1) % renorm_every == 0:
            dist = 0.0
            for i in range(d):
                dist += (y[i] - x[i]) ** 2
            dist = math.sqrt(dist)
            growth = math.log(max(dist, 1e-300) / d0)
            if step + 1 > discard_steps:
                total += growth
                counted += renorm_every * h
            if dist > 0.0:
                for i in range(d):
                    y[i] = x[i] + (y[i] - x[i]) * (d0 / dist)
            else:
                for i in range(d):
                    y[i] = x[i] + d0 * unit
    return total, counted, 0


def lyapunov_np(rhs, p, x0, h, n_steps, renorm_every, d0, discard_steps):
    d = x0.shape[0]
    unit = np.full(d, 1.0 / math.sqrt(d))
    x = x0.copy()
    y = x0 + d0 * unit
    total = 0.0
    counted = 0.0
    for step in range(n_steps):
        t = step * h
        x = _rk4_step_np(rhs, p, t, x, h)
        y = _rk4_step_np(rhs, p, t, y, h)
        if not np.all(np.abs(x) <= DIVERGENCE_LIMIT):
            return total, counted, 1
        if (step + 1) % renorm_every == 0:
            dist = float(np.linalg.norm(y - x))
            growth = math.log(max(dist, 1e-300) / d0)
            if step + 1 > discard_steps:
                total += growth
                counted += renorm_every * h
            y = x + (y - x) * (d0 / dist) if dist > 0.0 else x + d0 * unit
    return total, counted, 0
