"""Command-line front end: ``vofrac run|compare|list-systems``."""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .diagnostics import LyapunovError, largest_lyapunov, split_halves, sync_error, trajectory_stats
from .io import write_csv, write_summary, write_svg
from .solvers import solve
from .systems import list_systems

EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _tagged(path, tag):
    if path is None or not tag:
        return path
    return path.with_name(f"{path.stem}_{tag}{path.suffix}")


def _diagnostics(cfg, system, traj):
    diag = cfg.diagnostics
    out = {}
    finite = traj.finite_states()
    if finite.shape[0]:
        try:
            out["stats"] = trajectory_stats(traj, diag.transient_fraction).summary()
        except ValueError as exc:
            out["stats"] = {"error": str(exc)}
    if system.id == "coupled-lorenz":
        a, b = split_halves(traj)
        out["sync"] = sync_error(a, b, diag.sync_threshold).summary()
    if diag.lyapunov:
        if cfg.order.is_constant and cfg.order.params[0] == 1.0:
            try:
                out["lyapunov"] = largest_lyapunov(
                    system, cfg.initial, diag.lyapunov_horizon, diag.lyapunov_h
                )
            except (LyapunovError, ValueError) as exc:
                out["lyapunov"] = None
                out["lyapunov_error"] = str(exc)
        else:
            out["lyapunov"] = None
            out["lyapunov_error"] = "largest Lyapunov exponent is only estimated for psi = 1"
    return out


def _execute(cfg, system, scheme_cfg, tag):
    traj = solve(system, cfg.order, cfg.grid, cfg.initial, scheme_cfg)
    out = cfg.output
    files = {}
    if out.csv is not None:
        files["csv"] = write_csv(traj, _tagged(out.csv, tag))
    if out.svg is not None:
        title = f"{system.id} {scheme_cfg.scheme} ({scheme_cfg.mode})"
        files["svg"] = write_svg(traj, _tagged(out.svg, tag), out.portrait, title)
    summary = {
        "system": system.id,
        "preset": cfg.preset,
        "params": dict(system.params),
        "provenance": system.provenance,
        "initial": list(cfg.initial),
        "scheme": scheme_cfg.as_dict(),
        "order": cfg.order.describe(),
        "grid": {"t0": cfg.grid.t0, "h": cfg.grid.h, "n_steps": cfg.grid.n_steps, "t_end": cfg.grid.t_end},
        "elapsed_seconds": traj.wall_time,
        "backend": traj.metadata["backend"],
        "diverged_at": traj.diverged_at,
        "final_state": traj.states[-1].tolist(),
        "diagnostics": _diagnostics(cfg, system, traj),
        "files": {k: str(v) for k, v in files.items()},
    }
    return traj, summary


def _sweep_jobs(cfg):
    if cfg.sweep_param is None:
        return [(cfg.system, "")]
    jobs = []
    for i, value in enumerate(cfg.sweep_values):
        jobs.append((cfg.system.with_params(**{cfg.sweep_param: value}), f"{cfg.sweep_param}{i}"))
    return jobs


def cmd_run(args):
    cfg = load_config(args.config, command="run")
    jobs = _sweep_jobs(cfg)

    def one(job):
        system, tag = job
        _, summary = _execute(cfg, system, cfg.scheme, tag)
        if cfg.sweep_param is not None:
            summary["sweep"] = {"param": cfg.sweep_param, "value": system.params[cfg.sweep_param]}
        if cfg.output.summary is not None:
            write_summary(summary, _tagged(cfg.output.summary, tag))
        return summary

    if cfg.jobs > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            summaries = list(pool.map(one, jobs))
    else:
        summaries = [one(j) for j in jobs]
    for s in summaries:
        status = {
            "system": s["system"],
            "scheme": s["scheme"]["scheme"],
            "diverged_at": s["diverged_at"],
            "elapsed_seconds": round(s["elapsed_seconds"], 6),
            "files": s["files"],
        }
        if "sweep" in s:
            status["sweep"] = s["sweep"]
        print(json.dumps(status, sort_keys=True))
    return 0


def cmd_compare(args):
    cfg = load_config(args.config, command="compare")
    if cfg.sweep_param is not None:
        raise ConfigError("sweep", "compare does not support sweeps")
    rows = []
    summaries = []
    for scheme_cfg in cfg.schemes:
        traj, summary = _execute(cfg, cfg.system, scheme_cfg, scheme_cfg.scheme)
        summaries.append(summary)
        rows.append((scheme_cfg, traj))
    d = cfg.system.dimension
    lines = ["scheme,mode,cf_normalization,elapsed_seconds,diverged_at," + ",".join(f"x{i + 1}" for i in range(d))]
    for scheme_cfg, traj in rows:
        end = ",".join(repr(v) for v in traj.states[-1].tolist())
        div = "" if traj.diverged_at is None else str(traj.diverged_at)
        lines.append(
            f"{scheme_cfg.scheme},{scheme_cfg.mode},{scheme_cfg.cf_normalization},"
            f"{traj.wall_time!r},{div},{end}"
        )
    table = "\n".join(lines) + "\n"
    if cfg.output.table is not None:
        cfg.output.table.parent.mkdir(parents=True, exist_ok=True)
        cfg.output.table.write_text(table, encoding="ascii")
    if cfg.output.summary is not None:
        write_summary({"runs": summaries}, cfg.output.summary)
    sys.stdout.write(table)
    return 0


def _fmt(v):
    return repr(v) if not float(v).is_integer() else repr(int(v)) if abs(v) < 1e15 else repr(v)


def catalog_listing():
    out = []
    for e in list_systems():
        out.append(
            {
                "id": e.id,
                "dimension": e.dimension,
                "equations": e.description,
                "parameters": {n: e.defaults[n] for n in e.param_names},
                "notes": dict(e.notes),
                "presets": {
                    name: {
                        "params": dict(p.params),
                        "initial": list(p.initial),
                        "t_end": p.t_end,
                        "h": p.h,
                        "provenance": p.provenance,
                    }
                    for name, p in e.presets.items()
                },
            }
        )
    return out


def cmd_list_systems(args):
    listing = catalog_listing()
    if args.json:
        print(json.dumps(listing, indent=2))
        return 0
    for e in listing:
        print(f"{e['id']}  (dimension {e['dimension']})")
        print(f"    {e['equations']}")
        params = ", ".join(f"{k}={_fmt(v)}" for k, v in e["parameters"].items())
        print(f"    parameters (defaults): {params}")
        for key, note in e["notes"].items():
            print(f"    note [{key}]: {note}")
        for name, p in e["presets"].items():
            vals = ", ".join(f"{k}={_fmt(v)}" for k, v in p["params"].items())
            ic = ", ".join(_fmt(v) for v in p["initial"])
            print(f"    preset {name}: {vals}; initial ({ic})")
            print(f"        provenance: {p['provenance']}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vofrac", description="Variable-order fractional chaotic system simulator"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="integrate one configuration (or a parameter sweep)")
    p.add_argument("config", type=Path)
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("compare", help="run several schemes on one configuration")
    p.add_argument("config", type=Path)
    p.set_defaults(func=cmd_compare)
    p = sub.add_parser("list-systems", help="print the system catalog")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_list_systems)
    return parser


def _fail(kind, message, code, field=None):
    err = {"error": kind, "message": message}
    if field is not None:
        err["field"] = field
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", exc.message, EXIT_CONFIG, exc.field)
    except (ValueError, KeyError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
