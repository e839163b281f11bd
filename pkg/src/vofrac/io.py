"""Trajectory CSV, phase-portrait SVG and JSON summary writers."""

import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

SVG_SIZE = 600
SVG_MARGIN = 20


def csv_text(times, states):
    """CSV with header ``t,x1..xd``; floats in shortest round-trip form."""
    states = np.asarray(states, dtype=float)
    d = states.shape[1]
    lines = ["t," + ",".join(f"x{i + 1}" for i in range(d))]
    for t, row in zip(np.asarray(times, dtype=float).tolist(), states.tolist()):
        lines.append(",".join(map(repr, [t, *row])))
    return "\n".join(lines) + "\n"


def write_csv(traj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(traj.times, traj.states), encoding="ascii", newline="\n")
    return path


def read_csv(path):
    """Return (header, times, states) from a file written by :func:`write_csv`."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return header, data[:, 0], data[:, 1:]


def svg_text(xs, ys, title="", labels=("x", "y")):
    """Single-polyline SVG; the viewport is the finite data bounding box."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = xs[keep], ys[keep]
    size, margin = SVG_SIZE, SVG_MARGIN
    span = size - 2 * margin
    if xs.size:
        x_lo, x_hi = float(xs.min()), float(xs.max())
        y_lo, y_hi = float(ys.min()), float(ys.max())
    else:
        x_lo = x_hi = y_lo = y_hi = 0.0
    x_rng = x_hi - x_lo or 1.0
    y_rng = y_hi - y_lo or 1.0
    px = margin + (xs - x_lo) / x_rng * span
    py = margin + (y_hi - ys) / y_rng * span
    points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px.tolist(), py.tolist()))
    bounds = f"{labels[0]} in [{x_lo!r}, {x_hi!r}], {labels[1]} in [{y_lo!r}, {y_hi!r}]"
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f"<title>{escape(title)}</title>\n"
        f"<desc>{escape(bounds)}</desc>\n"
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>\n'
        f'<polyline fill="none" stroke="#1f4e79" stroke-width="0.6" points="{points}"/>\n'
        "</svg>\n"
    )


def write_svg(traj, path, components=(0, 2), title=""):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    states = traj.finite_states()
    if components is None:
        xs, ys = traj.times[: states.shape[0]], states[:, 0]
        labels = ("t", "x1")
    else:
        i, j = components
        xs, ys = states[:, i], states[:, j]
        labels = (f"x{i + 1}", f"x{j + 1}")
    path.write_text(svg_text(xs, ys, title, labels), encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_summary(data, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def to_json(data):
    return json.dumps(_jsonable(data), indent=2, sort_keys=True)
