"""Strict TOML run configuration.

Every section rejects unknown keys. Relative output paths resolve against
the directory holding the config file. See README.md for the schema.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .model import DEFAULT_CLAMP, DEFAULT_MAX_STEPS, OrderFunction, build_grid
from .solvers import BOOTSTRAPS, CF_NORMALIZATIONS, MODES, SCHEMES, SchemeConfig
from .systems import get_entry, make_system


class ConfigError(ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


_SECTIONS = {
    "system": {"id", "preset", "params", "initial", "langford_corrected"},
    "scheme": {"name", "names", "mode", "cf_normalization", "history_bootstrap"},
    "order": {"kind", "value", "start", "end", "t_start", "t_end", "base", "amplitude", "frequency", "clamp"},
    "grid": {"t0", "t_end", "h", "max_steps"},
    "output": {"csv", "svg", "summary", "table", "portrait"},
    "diagnostics": {"transient_fraction", "lyapunov", "lyapunov_horizon", "lyapunov_h", "sync_threshold"},
    "sweep": {"param", "values", "jobs"},
}


@dataclass
class OutputSpec:
    csv: Path = None
    svg: Path = None
    summary: Path = None
    table: Path = None
    portrait: tuple = (0, 2)


@dataclass
class DiagnosticsSpec:
    transient_fraction: float = 0.1
    lyapunov: bool = False
    lyapunov_horizon: float = 1000.0
    lyapunov_h: float = 1e-3
    sync_threshold: float = 1e-3


@dataclass
class RunConfig:
    system: object
    system_id: str
    preset: str
    initial: tuple
    schemes: list
    order: OrderFunction
    grid: object
    output: OutputSpec
    diagnostics: DiagnosticsSpec
    sweep_param: str = None
    sweep_values: list = field(default_factory=list)
    jobs: int = 1
    source: Path = None

    @property
    def scheme(self):
        return self.schemes[0]


def _number(value, where, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(where, f"expected an integer, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(where, "must be finite")
    if positive and not value > 0:
        raise ConfigError(where, f"must be positive, got {value!r}")
    return value


def _string(value, where, allowed=None):
    if not isinstance(value, str):
        raise ConfigError(where, f"expected a string, got {value!r}")
    if allowed is not None and value not in allowed:
        raise ConfigError(where, f"must be one of {list(allowed)}, got {value!r}")
    return value


def _bool(value, where):
    if not isinstance(value, bool):
        raise ConfigError(where, f"expected true/false, got {value!r}")
    return value


def _section(raw, name, required=False):
    if name not in raw:
        if required:
            raise ConfigError(name, "section is required")
        return {}
    sec = raw[name]
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be a table")
    unknown = sorted(set(sec) - _SECTIONS[name])
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}", "unknown key")
    return sec


def load_config(path, command="run"):
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"TOML parse error: {exc}") from None
    return parse_config(raw, base_dir=path.parent, command=command, source=path)


def parse_config(raw, base_dir=".", command="run", source=None):
    unknown = sorted(set(raw) - set(_SECTIONS))
    if unknown:
        raise ConfigError(unknown[0], "unknown section")
    base_dir = Path(base_dir)

    sec = _section(raw, "system", required=True)
    if "id" not in sec:
        raise ConfigError("system.id", "is required")
    system_id = _string(sec["id"], "system.id")
    try:
        entry = get_entry(system_id)
    except KeyError as exc:
        raise ConfigError("system.id", str(exc.args[0])) from None
    preset_name = None
    preset = None
    if "preset" in sec:
        preset_name = _string(sec["preset"], "system.preset", allowed=sorted(entry.presets))
        preset = entry.presets[preset_name]
    params = sec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("system.params", "must be a table")
    for key, value in params.items():
        if key not in entry.param_names:
            raise ConfigError(f"system.params.{key}", f"unknown parameter for {system_id!r}")
        _number(value, f"system.params.{key}")
    corrected = _bool(sec.get("langford_corrected", False), "system.langford_corrected")
    if corrected and system_id != "langford":
        raise ConfigError("system.langford_corrected", "only valid for the langford system")
    system = make_system(system_id, preset_name, params, langford_corrected=corrected)

    if "initial" in sec:
        init = sec["initial"]
        if not isinstance(init, list):
            raise ConfigError("system.initial", "expected a list of numbers")
        initial = tuple(_number(v, f"system.initial[{i}]") for i, v in enumerate(init))
    elif preset is not None:
        initial = tuple(preset.initial)
    else:
        initial = tuple(entry.presets[next(iter(entry.presets))].initial)
    if len(initial) != entry.dimension:
        raise ConfigError("system.initial", f"needs {entry.dimension} components, got {len(initial)}")

    sec = _section(raw, "scheme")
    if command == "compare":
        if "name" in sec:
            raise ConfigError("scheme.name", "compare takes a list in scheme.names")
        names = sec.get("names")
        if not isinstance(names, list) or len(names) < 2:
            raise ConfigError("scheme.names", "compare needs a list of at least two schemes")
        if len(set(names)) != len(names):
            raise ConfigError("scheme.names", "schemes must be distinct")
    else:
        if "names" in sec:
            raise ConfigError("scheme.names", "run takes a single scheme in scheme.name")
        names = [sec.get("name", "LC")]
    names = [_string(n, "scheme.names" if command == "compare" else "scheme.name", SCHEMES) for n in names]
    mode = _string(sec.get("mode", "reference"), "scheme.mode", MODES)
    norm = _string(sec.get("cf_normalization", "paper"), "scheme.cf_normalization", CF_NORMALIZATIONS)
    boot = _string(sec.get("history_bootstrap", "flat"), "scheme.history_bootstrap", BOOTSTRAPS)
    schemes = [SchemeConfig(n, mode, norm, boot) for n in names]

    sec = _section(raw, "grid", required=preset is None)
    t0 = _number(sec.get("t0", 0.0), "grid.t0")
    if "t_end" in sec:
        t_end = _number(sec["t_end"], "grid.t_end")
    elif preset is not None and preset.t_end is not None:
        t_end = preset.t_end
    else:
        raise ConfigError("grid.t_end", "is required")
    if "h" in sec:
        h = _number(sec["h"], "grid.h", positive=True)
    elif preset is not None and preset.h is not None:
        h = preset.h
    else:
        raise ConfigError("grid.h", "is required")
    max_steps = int(_number(sec.get("max_steps", DEFAULT_MAX_STEPS), "grid.max_steps", positive=True, integer=True))
    if not t_end > t0:
        raise ConfigError("grid.t_end", f"must exceed t0 ({t0})")
    try:
        grid = build_grid(t0, t_end, h, max_steps=max_steps)
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from None

    order = _parse_order(_section(raw, "order"), grid)

    sec = _section(raw, "output")
    out = OutputSpec()
    for key in ("csv", "svg", "summary", "table"):
        if key in sec:
            setattr(out, key, base_dir / _string(sec[key], f"output.{key}"))
    if "portrait" in sec:
        pair = sec["portrait"]
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError("output.portrait", "expected two component indices")
        idx = tuple(int(_number(v, "output.portrait", integer=True)) for v in pair)
        if not all(0 <= i < entry.dimension for i in idx) or idx[0] == idx[1]:
            raise ConfigError("output.portrait", f"indices must be distinct and within 0..{entry.dimension - 1}")
        out.portrait = idx
    elif entry.dimension < 3:
        out.portrait = (0, 1) if entry.dimension == 2 else None

    sec = _section(raw, "diagnostics")
    diag = DiagnosticsSpec()
    if "transient_fraction" in sec:
        tf = _number(sec["transient_fraction"], "diagnostics.transient_fraction")
        if not 0.0 <= tf < 1.0:
            raise ConfigError("diagnostics.transient_fraction", "must lie in [0, 1)")
        diag.transient_fraction = tf
    if "lyapunov" in sec:
        diag.lyapunov = _bool(sec["lyapunov"], "diagnostics.lyapunov")
    if "lyapunov_horizon" in sec:
        diag.lyapunov_horizon = _number(sec["lyapunov_horizon"], "diagnostics.lyapunov_horizon", positive=True)
    if "lyapunov_h" in sec:
        diag.lyapunov_h = _number(sec["lyapunov_h"], "diagnostics.lyapunov_h", positive=True)
    if "sync_threshold" in sec:
        diag.sync_threshold = _number(sec["sync_threshold"], "diagnostics.sync_threshold", positive=True)

    cfg = RunConfig(
        system=system,
        system_id=system_id,
        preset=preset_name,
        initial=initial,
        schemes=schemes,
        order=order,
        grid=grid,
        output=out,
        diagnostics=diag,
        source=source,
    )

    sec = _section(raw, "sweep")
    if sec:
        if "param" not in sec or "values" not in sec:
            raise ConfigError("sweep", "needs both 'param' and 'values'")
        param = _string(sec["param"], "sweep.param", allowed=entry.param_names)
        values = sec["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values", "expected a non-empty list")
        cfg.sweep_param = param
        cfg.sweep_values = [_number(v, f"sweep.values[{i}]") for i, v in enumerate(values)]
        cfg.jobs = int(_number(sec.get("jobs", 1), "sweep.jobs", positive=True, integer=True))
    return cfg


def _parse_order(sec, grid):
    kind = _string(sec.get("kind", "constant"), "order.kind", ("constant", "ramp", "sinusoidal"))
    allowed = {
        "constant": {"value"},
        "ramp": {"start", "end", "t_start", "t_end"},
        "sinusoidal": {"base", "amplitude", "frequency"},
    }[kind] | {"kind", "clamp"}
    stray = sorted(set(sec) - allowed)
    if stray:
        raise ConfigError(f"order.{stray[0]}", f"not a parameter of the {kind} order")
    clamp = DEFAULT_CLAMP
    if "clamp" in sec:
        c = sec["clamp"]
        if not (isinstance(c, list) and len(c) == 2):
            raise ConfigError("order.clamp", "expected [low, high]")
        clamp = (_number(c[0], "order.clamp"), _number(c[1], "order.clamp"))

    def num(key, default=None):
        if key not in sec:
            if default is None:
                raise ConfigError(f"order.{key}", f"is required for the {kind} order")
            return default
        return _number(sec[key], f"order.{key}")

    try:
        if kind == "constant":
            return OrderFunction.constant(num("value", 1.0), clamp)
        if kind == "ramp":
            return OrderFunction.ramp(
                num("start"), num("end"), num("t_start", grid.t0), num("t_end", grid.t_end), clamp
            )
        return OrderFunction.sinusoidal(num("base"), num("amplitude"), num("frequency"), clamp)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("order", str(exc)) from None
