"""Value types shared by the solvers, diagnostics and CLI."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

DEFAULT_MAX_STEPS = 10**7
DEFAULT_CLAMP = (0.05, 1.0)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform mesh t_k = t0 + k*h, k = 0..n_steps."""

    t0: float
    h: float
    n_steps: int

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"grid step h must be positive and finite, got {self.h!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"grid needs at least one step, got n_steps={self.n_steps!r}")
        if not math.isfinite(self.t0):
            raise ValueError("grid start t0 must be finite")

    @property
    def nodes(self):
        return self.t0 + self.h * np.arange(self.n_steps + 1, dtype=float)

    @property
    def t_end(self):
        return self.t0 + self.h * self.n_steps

    def __len__(self):
        return self.n_steps + 1


def build_grid(t0, t_end, h, max_steps=DEFAULT_MAX_STEPS):
    t0, t_end, h = float(t0), float(t_end), float(h)
    if not (math.isfinite(h) and h > 0):
        raise ValueError(f"step h must be positive, got {h!r}")
    if not t_end > t0:
        raise ValueError(f"t_end ({t_end}) must exceed t0 ({t0})")
    n = int(round((t_end - t0) / h))
    if n < 1:
        raise ValueError(f"interval [{t0}, {t_end}] is shorter than one step of {h}")
    if n > max_steps:
        raise ValueError(f"grid would need {n} steps, above the cap of {max_steps}")
    return TimeGrid(t0, h, n)


_ORDER_KINDS = ("constant", "ramp", "sinusoidal")


@dataclass(frozen=True)
class OrderFunction:
    """Variable fractional order psi(t), clamped into ``clamp`` within (0, 1].

    ``params`` per kind:

    * constant: ``(value,)``
    * ramp: ``(start_value, end_value, t_start, t_end)``, held flat outside
    * sinusoidal: ``(base, amplitude, angular_frequency)``
    """

    kind: str
    params: tuple
    clamp: tuple = DEFAULT_CLAMP

    def __post_init__(self):
        if self.kind not in _ORDER_KINDS:
            raise ValueError(f"unknown order kind {self.kind!r}; expected one of {_ORDER_KINDS}")
        lo, hi = self.clamp
        if not (0.0 < lo <= hi <= 1.0):
            raise ValueError(f"order clamp bounds {self.clamp!r} must satisfy 0 < lo <= hi <= 1")
        expected = {"constant": 1, "ramp": 4, "sinusoidal": 3}[self.kind]
        if len(self.params) != expected:
            raise ValueError(f"{self.kind} order takes {expected} parameters, got {len(self.params)}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError("order parameters must be finite")
        if self.kind == "constant" and not (0.0 < self.params[0] <= 1.0):
            raise ValueError(f"constant order must lie in (0, 1], got {self.params[0]!r}")
        if self.kind == "ramp" and not self.params[3] > self.params[2]:
            raise ValueError("ramp needs t_end > t_start")

    @classmethod
    def constant(cls, value, clamp=DEFAULT_CLAMP):
        return cls("constant", (float(value),), tuple(clamp))

    @classmethod
    def ramp(cls, start, end, t_start, t_end, clamp=DEFAULT_CLAMP):
        return cls("ramp", (float(start), float(end), float(t_start), float(t_end)), tuple(clamp))

    @classmethod
    def sinusoidal(cls, base, amplitude, frequency, clamp=DEFAULT_CLAMP):
        return cls("sinusoidal", (float(base), float(amplitude), float(frequency)), tuple(clamp))

    @property
    def is_constant(self):
        return self.kind == "constant"

    def __call__(self, t):
        return eval_order(self, t)

    def on_grid(self, grid):
        """Order evaluated at every node of ``grid``."""
        if self.is_constant:
            return np.full(len(grid), eval_order(self, grid.t0))
        return np.array([eval_order(self, t) for t in grid.nodes])

    def describe(self):
        return {"kind": self.kind, "params": list(self.params), "clamp": list(self.clamp)}


def eval_order(order, t):
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"order evaluated at non-finite time {t!r}")
    p = order.params
    if order.kind == "constant":
        raw = p[0]
    elif order.kind == "ramp":
        start, end, ta, tb = p
        frac = min(max((t - ta) / (tb - ta), 0.0), 1.0)
        raw = start + (end - start) * frac
    else:
        base, amp, freq = p
        raw = base + amp * math.sin(freq * t)
    lo, hi = order.clamp
    return min(max(raw, lo), hi)


@dataclass(frozen=True)
class SystemDefinition:
    """A named right-hand side ``rhs(t, x, p, out)`` writing dx/dt into ``out``.

    ``code`` indexes the compiled dispatch table in :mod:`vofrac.systems`;
    definitions without a code run on the interpreted numpy path only.
    """

    id: str
    dimension: int
    param_names: tuple
    params: dict
    rhs: Callable
    code: Optional[int] = None
    provenance: str = ""

    def __post_init__(self):
        missing = [n for n in self.param_names if n not in self.params]
        extra = [n for n in self.params if n not in self.param_names]
        if missing or extra:
            raise ValueError(
                f"system {self.id!r}: parameters mismatch (missing {missing}, unknown {extra})"
            )
        for name, value in self.params.items():
            if not math.isfinite(value):
                raise ValueError(f"system {self.id!r}: parameter {name} is not finite")

    def param_array(self):
        return np.array([float(self.params[n]) for n in self.param_names], dtype=float)

    def with_params(self, **overrides):
        unknown = sorted(set(overrides) - set(self.param_names))
        if unknown:
            raise KeyError(f"system {self.id!r} has no parameter(s) {unknown}")
        params = dict(self.params)
        params.update({k: float(v) for k, v in overrides.items()})
        return replace(self, params=params)

    def evaluate(self, t, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"system {self.id!r} expects a state of length {self.dimension}")
        out = np.empty(self.dimension)
        self.rhs(float(t), x, self.param_array(), out)
        return out


@dataclass
class Trajectory:
    """States X_0..X_N on ``grid``; rows from ``diverged_at`` onward are NaN."""

    grid: TimeGrid
    states: np.ndarray
    scheme: str
    order: Optional[OrderFunction]
    diverged_at: Optional[int] = None
    wall_time: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.grid.nodes

    @property
    def dimension(self):
        return self.states.shape[1]

    @property
    def diverged(self):
        return self.diverged_at is not None

    def finite_states(self):
        if self.diverged_at is None:
            return self.states
        return self.states[: self.diverged_at]
