"""Catalog of right-hand sides.

Every rhs has the signature ``rhs(t, x, p, out)`` and writes dx/dt into
``out``; ``p`` is the parameter vector in the order of ``param_names``.
The compiled loops reach the catalog through :func:`rhs_by_code`, a single
dispatch function, so one compiled kernel serves every system.
"""

from dataclasses import dataclass, field

import numpy as np

from ._backend import maybe_njit
from .model import SystemDefinition

FINANCIAL, LORENZ, COUPLED_LORENZ, LANGFORD, LANGFORD_CORRECTED = 0, 1, 2, 3, 4
ROSSLER, SHILNIKOV, LINEAR_PROBE, AFFINE = 5, 6, 7, 8


@maybe_njit(cache=True)
def financial_rhs(t, x, p, out):
    # p = (L, M, N)
    out[0] = x[2] + (x[1] - p[0]) * x[0]
    out[1] = 1.0 - p[1] * x[1] - x[0] * x[0]
    out[2] = -x[0] - p[2] * x[2]


@maybe_njit(cache=True)
def lorenz_rhs(t, x, p, out):
    # p = (sigma, r, b)
    out[0] = -p[0] * x[0] + p[0] * x[1]
    out[1] = p[1] * x[0] - x[1] - x[0] * x[2]
    out[2] = x[0] * x[1] - p[2] * x[2]


@maybe_njit(cache=True)
def coupled_lorenz_rhs(t, x, p, out):
    # p = (sigma, r, b, k); diffusive coupling on the first component of each copy
    sigma, r, b, k = p[0], p[1], p[2], p[3]
    x1, y1, z1, x2, y2, z2 = x[0], x[1], x[2], x[3], x[4], x[5]
    out[0] = -sigma * x1 + sigma * y1 + k * (x2 - x1)
    out[1] = r * x1 - y1 - x1 * z1
    out[2] = x1 * y1 - b * z1
    out[3] = -sigma * x2 + sigma * y2 + k * (x1 - x2)
    out[4] = r * x2 - y2 - x2 * z2
    out[5] = x2 * y2 - b * z2


@maybe_njit(cache=True)
def _langford_z(x, p):
    a, big_l, rho, eps = p[0], p[3], p[4], p[5]
    r2 = x[0] * x[0] + x[1] * x[1]
    return big_l + a * x[2] - x[2] ** 3 / 3.0 - r2 * (1.0 + rho * x[2]) + eps * x[2] * x[0] ** 3


@maybe_njit(cache=True)
def langford_rhs(t, x, p, out):
    # p = (a, b, omega, L, p, E); y-equation exactly as published: omega*x + (z - omega)*y
    out[0] = (x[2] - p[1]) * x[0] - p[2] * x[1]
    out[1] = p[2] * x[0] + (x[2] - p[2]) * x[1]
    out[2] = _langford_z(x, p)


@maybe_njit(cache=True)
def langford_corrected_rhs(t, x, p, out):
    # literature form of the y-equation: omega*x + (z - b)*y
    out[0] = (x[2] - p[1]) * x[0] - p[2] * x[1]
    out[1] = p[2] * x[0] + (x[2] - p[1]) * x[1]
    out[2] = _langford_z(x, p)


@maybe_njit(cache=True)
def rossler_rhs(t, x, p, out):
    # p = (a, b, c)
    out[0] = -x[1] - x[2]
    out[1] = x[0] + p[0] * x[1]
    out[2] = p[1] + x[0] * x[2] - p[2] * x[2]


@maybe_njit(cache=True)
def shilnikov_rhs(t, x, p, out):
    # p = (a, b, c, d)
    out[0] = x[1]
    out[1] = x[2]
    out[2] = -p[0] * x[2] - x[1] + p[1] * x[0] * (1.0 - p[2] * x[0] - p[3] * x[0] * x[0])


@maybe_njit(cache=True)
def linear_probe_rhs(t, x, p, out):
    out[0] = p[0] * x[0]


@maybe_njit(cache=True)
def affine_rhs(t, x, p, out):
    # p = (lam, c); componentwise lam*x + c, any dimension
    for i in range(x.shape[0]):
        out[i] = p[0] * x[i] + p[1]


@maybe_njit(cache=True)
def rhs_by_code(code, t, x, p, out):
    if code == LORENZ:
        lorenz_rhs(t, x, p, out)
    elif code == FINANCIAL:
        financial_rhs(t, x, p, out)
    elif code == COUPLED_LORENZ:
        coupled_lorenz_rhs(t, x, p, out)
    elif code == LANGFORD:
        langford_rhs(t, x, p, out)
    elif code == LANGFORD_CORRECTED:
        langford_corrected_rhs(t, x, p, out)
    elif code == ROSSLER:
        rossler_rhs(t, x, p, out)
    elif code == SHILNIKOV:
        shilnikov_rhs(t, x, p, out)
    elif code == LINEAR_PROBE:
        linear_probe_rhs(t, x, p, out)
    elif code == AFFINE:
        affine_rhs(t, x, p, out)
    else:
        raise ValueError("unknown system code")


@dataclass(frozen=True)
class Preset:
    name: str
    params: dict
    initial: tuple
    provenance: str
    t_end: float = None
    h: float = None


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    dimension: int
    param_names: tuple
    defaults: dict
    rhs: object
    code: int
    presets: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    description: str = ""

    def preset(self, name):
        try:
            return self.presets[name]
        except KeyError:
            raise KeyError(
                f"system {self.id!r} has no preset {name!r}; available: {sorted(self.presets)}"
            ) from None


_DUPLICATED_CAPTION = (
    "published figure {n} caption: a=1, b=0.1, c=1, IC (2,-1,1), h=0.01, t in [0,300]; "
    "this caption text is repeated verbatim across figures 1, 4 and 5, "
    "so it does not independently confirm any of them"
)


def _entry(id, dimension, param_names, rhs, code, presets, description, notes=None, default=None):
    presets = {p.name: p for p in presets}
    default_preset = presets[default] if default else next(iter(presets.values()))
    return CatalogEntry(
        id=id,
        dimension=dimension,
        param_names=tuple(param_names),
        defaults=dict(default_preset.params),
        rhs=rhs,
        code=code,
        presets=presets,
        notes=dict(notes or {}),
        description=description,
    )


CATALOG = {
    e.id: e
    for e in [
        _entry(
            "financial",
            3,
            ("L", "M", "N"),
            financial_rhs,
            FINANCIAL,
            [
                Preset(
                    "fig1",
                    {"L": 1.0, "M": 0.1, "N": 1.0},
                    (2.0, -1.0, 1.0),
                    _DUPLICATED_CAPTION.format(n=1)
                    + "; caption symbols (a, b, c) mapped positionally to (L, M, N)",
                    300.0,
                    0.01,
                ),
                Preset(
                    "chaotic",
                    {"L": 3.0, "M": 0.1, "N": 1.0},
                    (2.0, -1.0, 1.0),
                    "widely studied chaotic regime of this model; chaos is checked in-repo "
                    "with the largest-Lyapunov estimator, not taken from the publication",
                    300.0,
                    0.01,
                ),
            ],
            "x' = z + (y - L)x, y' = 1 - My - x^2, z' = -x - Nz",
        ),
        _entry(
            "lorenz",
            3,
            ("sigma", "r", "b"),
            lorenz_rhs,
            LORENZ,
            [
                Preset(
                    "fig2",
                    {"sigma": 10.0, "r": 30.0, "b": 8.0 / 3.0},
                    (0.1, 0.1, 0.1),
                    "published figure 2 caption: sigma=10, b=8/3, r=30, IC (0.1,0.1,0.1), "
                    "h=0.01, t in [0,500]",
                    500.0,
                    0.01,
                ),
                Preset(
                    "classical",
                    {"sigma": 10.0, "r": 28.0, "b": 8.0 / 3.0},
                    (1.0, 1.0, 1.0),
                    "classical chaotic parameters (r=28); literature cross-check only",
                    100.0,
                    0.01,
                ),
            ],
            "x' = sigma(y - x), y' = rx - y - xz, z' = xy - bz",
        ),
        _entry(
            "coupled-lorenz",
            6,
            ("sigma", "r", "b", "k"),
            coupled_lorenz_rhs,
            COUPLED_LORENZ,
            [
                Preset(
                    "sync",
                    {"sigma": 10.0, "r": 30.0, "b": 8.0 / 3.0, "k": 10.0},
                    (0.1, 0.1, 0.1, 5.0, -5.0, 20.0),
                    "bidirectional diffusive coupling of two figure-2 Lorenz copies; the "
                    "published control form is incomplete, coupling k(x2-x1) is a reconstruction",
                    50.0,
                    0.01,
                ),
                Preset(
                    "uncoupled",
                    {"sigma": 10.0, "r": 30.0, "b": 8.0 / 3.0, "k": 0.0},
                    (0.1, 0.1, 0.1, 5.0, -5.0, 20.0),
                    "same as 'sync' with the coupling switched off",
                    50.0,
                    0.01,
                ),
            ],
            "two Lorenz copies, x1' += k(x2 - x1), x2' += k(x1 - x2)",
        ),
        _entry(
            "langford",
            3,
            ("a", "b", "omega", "L", "p", "E"),
            langford_rhs,
            LANGFORD,
            [
                Preset(
                    "fig3",
                    {"a": 1.0, "b": 0.6, "omega": 3.6, "L": 0.6, "p": 0.2, "E": 0.0},
                    (0.0, 0.3, 0.0),
                    "published figure 3 caption: alpha=1, beta=0.6, lambda=0.6, omega=3.6, "
                    "rho=0.2, epsilon=0 mapped to a, b, L, omega, p, E; IC (0,0.3,0); "
                    "h=0.01, t in [0,300]",
                    300.0,
                    0.01,
                ),
            ],
            "x' = (z - b)x - omega y, y' = omega x + (z - omega)y, "
            "z' = L + az - z^3/3 - (x^2 + y^2)(1 + pz) + E z x^3",
            notes={
                "langford_corrected": "config flag; when true the y-equation uses (z - b)y "
                "instead of the published (z - omega)y. Default false."
            },
        ),
        _entry(
            "rossler",
            3,
            ("a", "b", "c"),
            rossler_rhs,
            ROSSLER,
            [
                Preset(
                    "fig4",
                    {"a": 1.0, "b": 0.1, "c": 1.0},
                    (2.0, -1.0, 1.0),
                    _DUPLICATED_CAPTION.format(n=4),
                    300.0,
                    0.01,
                ),
                Preset(
                    "classical",
                    {"a": 0.2, "b": 0.2, "c": 5.7},
                    (1.0, 1.0, 1.0),
                    "classical chaotic parameters a=b=0.2, c=5.7; literature cross-check only",
                    500.0,
                    0.01,
                ),
            ],
            "x' = -y - z, y' = x + ay, z' = b + xz - cz",
        ),
        _entry(
            "shilnikov",
            3,
            ("a", "b", "c", "d"),
            shilnikov_rhs,
            SHILNIKOV,
            [
                Preset(
                    "fig5",
                    {"a": 1.0, "b": 0.1, "c": 1.0, "d": 0.0},
                    (2.0, -1.0, 1.0),
                    _DUPLICATED_CAPTION.format(n=5)
                    + "; d is absent from the caption and defaults to 0",
                    300.0,
                    0.01,
                ),
            ],
            "x' = y, y' = z, z' = -az - y + bx(1 - cx - dx^2)",
            notes={"d": "not given in the published caption; default 0, settable in config"},
        ),
        _entry(
            "linear-probe",
            1,
            ("lam",),
            linear_probe_rhs,
            LINEAR_PROBE,
            [
                Preset(
                    "relaxation",
                    {"lam": -1.0},
                    (1.0,),
                    "oracle system; exact solution x0 * E_psi(lam * t^psi) for constant psi",
                    1.0,
                    1e-3,
                ),
            ],
            "x' = lam x",
        ),
    ]
}


def get_entry(system_id):
    try:
        return CATALOG[system_id]
    except KeyError:
        raise KeyError(f"unknown system {system_id!r}; known: {sorted(CATALOG)}") from None


def make_system(system_id, preset=None, params=None, langford_corrected=False):
    """Build a :class:`SystemDefinition` from the catalog.

    Parameters start from the catalog defaults, are replaced by ``preset``
    and then by the explicit ``params`` overrides.
    """
    entry = get_entry(system_id)
    values = dict(entry.defaults)
    provenance = "catalog defaults"
    if preset is not None:
        p = entry.preset(preset)
        values.update(p.params)
        provenance = p.provenance
    if params:
        unknown = sorted(set(params) - set(entry.param_names))
        if unknown:
            raise KeyError(f"system {system_id!r} has no parameter(s) {unknown}")
        values.update({k: float(v) for k, v in params.items()})
    rhs, code = entry.rhs, entry.code
    if langford_corrected:
        if system_id != "langford":
            raise ValueError("langford_corrected applies to the langford system only")
        rhs, code = langford_corrected_rhs, LANGFORD_CORRECTED
        provenance += "; y-equation corrected to (z - b)y"
    return SystemDefinition(
        id=system_id,
        dimension=entry.dimension,
        param_names=entry.param_names,
        params={k: float(values[k]) for k in entry.param_names},
        rhs=rhs,
        code=code,
        provenance=provenance,
    )


def affine_system(dimension=1, lam=0.0, const=0.0):
    """lam * x + const in every component; test probe, not part of the catalog."""
    return SystemDefinition(
        id="affine",
        dimension=int(dimension),
        param_names=("lam", "c"),
        params={"lam": float(lam), "c": float(const)},
        rhs=affine_rhs,
        code=AFFINE,
        provenance="internal affine probe",
    )


def list_systems():
    return list(CATALOG.values())
