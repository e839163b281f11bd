"""Synchronization error, boundedness/moment statistics and largest Lyapunov exponent."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend, _loops
from .model import Trajectory

DEFAULT_SYNC_THRESHOLD = 1e-3
DEFAULT_TRANSIENT = 0.1


@dataclass
class SyncReport:
    errors: np.ndarray
    tail_mean: float
    synchronized: bool
    threshold: float

    def summary(self):
        return {
            "tail_mean": self.tail_mean,
            "max_error": float(np.nanmax(self.errors)) if self.errors.size else 0.0,
            "synchronized": self.synchronized,
            "threshold": self.threshold,
        }


@dataclass
class ChaosReport:
    bounds: list
    moments: list
    transient_fraction: float
    lyapunov_estimate: float = None
    retained_nodes: int = 0
    extra: dict = field(default_factory=dict)

    def summary(self):
        out = {
            "transient_fraction": self.transient_fraction,
            "retained_nodes": self.retained_nodes,
            "bounds": [list(b) for b in self.bounds],
            "moments": [dict(m) for m in self.moments],
            "lyapunov_estimate": self.lyapunov_estimate,
        }
        out.update(self.extra)
        return out


def _tail_start(n_nodes, fraction):
    return n_nodes - max(1, int(math.ceil(fraction * n_nodes)))


def sync_error(traj_a, traj_b, threshold=DEFAULT_SYNC_THRESHOLD, tail_fraction=0.1):
    """Euclidean distance between two trajectories node by node.

    ``synchronized`` holds when the mean distance over the last
    ``tail_fraction`` of nodes is below ``threshold``. A diverged input
    yields NaN distances there and is never synchronized.
    """
    ga, gb = traj_a.grid, traj_b.grid
    if (ga.t0, ga.h, ga.n_steps) != (gb.t0, gb.h, gb.n_steps):
        raise ValueError("sync_error: trajectories live on different grids")
    if traj_a.states.shape != traj_b.states.shape:
        raise ValueError("sync_error: trajectories have different dimensions")
    errors = np.sqrt(np.sum((traj_a.states - traj_b.states) ** 2, axis=1))
    tail = errors[_tail_start(errors.size, tail_fraction) :]
    tail_mean = float(np.mean(tail))
    synced = bool(np.isfinite(tail_mean) and tail_mean < threshold)
    return SyncReport(errors, tail_mean, synced, float(threshold))


def split_halves(traj):
    """Split a trajectory of an even-dimensional coupled system into its two copies."""
    d = traj.dimension
    if d % 2:
        raise ValueError("split_halves needs an even state dimension")
    half = d // 2
    return (
        replace(traj, states=traj.states[:, :half], metadata=dict(traj.metadata, half=0)),
        replace(traj, states=traj.states[:, half:], metadata=dict(traj.metadata, half=1)),
    )


def trajectory_stats(traj, transient_fraction=DEFAULT_TRANSIENT):
    """Per-component bounds and moments after dropping the leading transient.

    Only the finite prefix of a diverged trajectory is used.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must lie in [0, 1)")
    states = traj.finite_states() if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    window = states[int(math.floor(transient_fraction * states.shape[0])) :]
    if window.shape[0] == 0:
        raise ValueError("trajectory_stats: no samples left after the transient")
    bounds = []
    moments = []
    for col in window.T:
        mean = float(np.mean(col))
        centred = col - mean
        var = float(np.mean(centred**2))
        kurt = float(np.mean(centred**4) / var**2 - 3.0) if var > 0.0 else float("nan")
        bounds.append((float(np.min(col)), float(np.max(col))))
        moments.append({"mean": mean, "variance": var, "excess_kurtosis": kurt})
    return ChaosReport(
        bounds=bounds,
        moments=moments,
        transient_fraction=float(transient_fraction),
        retained_nodes=int(window.shape[0]),
    )


class LyapunovError(RuntimeError):
    pass


def largest_lyapunov(
    system,
    x0,
    horizon,
    h,
    params=None,
    tau=1.0,
    d0=1e-8,
    transient_fraction=DEFAULT_TRANSIENT,
    min_horizon=200.0,
    backend=None,
):
    """Largest Lyapunov exponent of the integer-order system by two-trajectory rescaling.

    A companion starts ``d0`` away along the diagonal; both are advanced
    with RK4 and the companion is pulled back to distance ``d0`` every
    ``tau`` time units. The estimate averages log(d/d0)/tau over the
    renormalizations after the first ``transient_fraction`` of the horizon.
    """
    if params:
        system = system.with_params(**params)
    if horizon < min_horizon:
        raise ValueError(f"horizon must be at least {min_horizon} time units, got {horizon}")
    if not h > 0 or not tau >= h:
        raise ValueError("need h > 0 and tau >= h")
    x0 = np.array(x0, dtype=float).reshape(-1)
    if x0.shape != (system.dimension,):
        raise ValueError(f"initial state must have {system.dimension} components")
    n_steps = int(round(horizon / h))
    renorm = max(1, int(round(tau / h)))
    discard = int(round(transient_fraction * n_steps))
    p = system.param_array()
    if backend is None:
        backend = _backend.backend_name()
    if backend == "numba" and _backend.USE_NUMBA and system.code is not None:
        total, counted, status = _loops.lyapunov_jit(system.code, p, x0, h, n_steps, renorm, d0, discard)
    else:
        rhs = getattr(system.rhs, "py_func", system.rhs)
        total, counted, status = _loops.lyapunov_np(rhs, p, x0, h, n_steps, renorm, d0, discard)
    if status:
        raise LyapunovError(f"base trajectory of {system.id!r} diverged")
    if counted <= 0.0:
        raise LyapunovError("no renormalization intervals after the transient")
    return total / counted
