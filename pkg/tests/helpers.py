"""Independent oracles shared by the solver and acceptance tests."""

import numpy as np


def ab2_reference(system, x0, h, n_steps):
    """Classical two-step Adams-Bashforth, first step Euler (F_{-1} := F_0)."""
    x = np.array(x0, dtype=float)
    out = np.empty((n_steps + 1, x.size))
    out[0] = x
    f_prev = system.evaluate(0.0, x)
    for n in range(n_steps):
        f = system.evaluate(n * h, x)
        if n == 0:
            f_prev = f
        x = x + h * (1.5 * f - 0.5 * f_prev)
        f_prev = f
        out[n + 1] = x
    return out


def max_rel_dev(a, b):
    scale = np.maximum(np.abs(b), 1.0)
    return float(np.max(np.abs(a - b) / scale))
