"""Compare the numba kernels with the pure-numpy fallback.

Both backends are selected per call, so one process measures both; run
with numba installed and VOFRAC_DISABLE_NUMBA unset.

    python3 benchmarks/bench_backends.py [--repeat 3] [--quick] [--json out.json]
"""

import argparse
import json
import platform
import time

import numpy as np

from vofrac import USE_NUMBA
from vofrac.diagnostics import largest_lyapunov
from vofrac.model import OrderFunction, TimeGrid
from vofrac.solvers import SchemeConfig, solve
from vofrac.systems import make_system


def cases(quick):
    fin = make_system("financial", "fig1")
    lor = make_system("lorenz", "classical")
    x_fin = (2.0, -1.0, 1.0)
    sizes = (2_000, 8_000) if quick else (2_000, 10_000, 30_000)
    for n in sizes:
        grid = TimeGrid(0.0, 0.01, n)
        yield f"LC   psi=0.9      N={n}", lambda b, g=grid: solve(fin, OrderFunction.constant(0.9), g, x_fin, SchemeConfig("LC"), b)
    n = sizes[1]
    grid = TimeGrid(0.0, 0.01, n)
    ramp = OrderFunction.ramp(0.85, 1.0, 0.0, grid.t_end)
    yield f"ABC  psi ramp     N={n}", lambda b: solve(fin, ramp, grid, x_fin, SchemeConfig("ABC"), b)
    grid = TimeGrid(0.0, 0.01, 30_000)
    yield "CFC  psi=0.9      N=30000", lambda b: solve(fin, OrderFunction.constant(0.9), grid, x_fin, SchemeConfig("CFC"), b)
    yield "LC   psi=1        N=30000", lambda b: solve(fin, OrderFunction.constant(1.0), grid, x_fin, SchemeConfig("LC"), b)
    yield "RK4               N=30000", lambda b: solve(lor, OrderFunction.constant(1.0), grid, (1.0, 1.0, 1.0), SchemeConfig("RK4"), b)
    horizon = 200.0 if quick else 500.0
    yield f"LLE  Lorenz T={horizon:g} h=1e-2", lambda b: largest_lyapunov(lor, (1.0, 1.0, 1.0), horizon, 1e-2, backend=b)


def best_of(fn, repeat):
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def final(result):
    if isinstance(result, float):
        return np.array([result])
    return result.states[-1]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="smaller grids")
    parser.add_argument("--json", help="also write the table as JSON")
    args = parser.parse_args(argv)
    if not USE_NUMBA:
        parser.error("numba backend disabled; unset VOFRAC_DISABLE_NUMBA to compare")

    rows = []
    print(f"python {platform.python_version()}, numpy {np.__version__}, {platform.machine()}")
    print(f"{'case':<30} {'numba s':>10} {'numpy s':>10} {'speedup':>9} {'max |diff|':>11}")
    for name, run in cases(args.quick):
        run("numba")  # load compiled kernels before timing
        t_nb, r_nb = best_of(lambda: run("numba"), args.repeat)
        t_np, r_np = best_of(lambda: run("numpy"), max(1, min(args.repeat, 2)))
        diff = float(np.max(np.abs(final(r_nb) - final(r_np))))
        rows.append({"case": name, "numba_s": t_nb, "numpy_s": t_np, "speedup": t_np / t_nb, "max_abs_diff": diff})
        print(f"{name:<30} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f}x {diff:>11.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
