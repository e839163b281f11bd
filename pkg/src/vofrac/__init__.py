"""Variable-order fractional simulators for chaotic systems.

Three explicit schemes (Liouville-Caputo, Caputo-Fabrizio, Atangana-Baleanu)
over a uniform grid, a catalog of chaotic right-hand sides, and chaos
diagnostics. Hot loops run under numba unless ``VOFRAC_DISABLE_NUMBA=1``.
"""

__version__ = "0.1.0"

from ._backend import USE_NUMBA, backend_name
from .diagnostics import largest_lyapunov, split_halves, sync_error, trajectory_stats
from .kernels import norm_ab, norm_cf, weight_e1, weight_e2
from .model import OrderFunction, SystemDefinition, TimeGrid, Trajectory, build_grid, eval_order
from .solvers import SchemeConfig, solve, solve_abc, solve_cfc, solve_lc, solve_rk4
from .special import gamma, mittag_leffler
from .systems import affine_system, list_systems, make_system

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "largest_lyapunov",
    "split_halves",
    "sync_error",
    "trajectory_stats",
    "norm_ab",
    "norm_cf",
    "weight_e1",
    "weight_e2",
    "OrderFunction",
    "SystemDefinition",
    "TimeGrid",
    "Trajectory",
    "build_grid",
    "eval_order",
    "SchemeConfig",
    "solve",
    "solve_abc",
    "solve_cfc",
    "solve_lc",
    "solve_rk4",
    "gamma",
    "mittag_leffler",
    "affine_system",
    "list_systems",
    "make_system",
]
