import json
import shutil
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from vofrac.cli import catalog_listing, main
from vofrac.config import ConfigError, load_config
from vofrac.io import csv_text, read_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

FIG2 = """
[system]
id = "lorenz"
preset = "fig2"

[scheme]
name = "LC"

[grid]
t_end = 500.0
h = {h}

[output]
csv = "out/fig2.csv"
svg = "out/fig2.svg"
summary = "out/fig2.json"
"""

COMPARE = """
[system]
id = "lorenz"
preset = "fig2"

[scheme]
names = {names}
cf_normalization = "unit"

[grid]
t_end = 5.0
h = 0.01

[output]
csv = "out/cmp.csv"
svg = "out/cmp.svg"
table = "out/table.csv"
"""


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_fig2_run_outputs(tmp_path, capsys):
    cfg = write(tmp_path, FIG2.format(h=0.01))
    assert run_cli("run", cfg) == 0
    status = json.loads(capsys.readouterr().out.strip())
    assert status["diverged_at"] is None
    header, times, states = read_csv(tmp_path / "out/fig2.csv")
    assert header == ["t", "x1", "x2", "x3"]
    assert times.size == 50001 and states.shape == (50001, 3)
    assert times[-1] == pytest.approx(500.0)
    summary = json.loads((tmp_path / "out/fig2.json").read_text())
    assert summary["scheme"]["mode"] == "reference"
    assert summary["grid"]["n_steps"] == 50000
    assert "elapsed_seconds" in summary and summary["diverged_at"] is None
    assert summary["diagnostics"]["stats"]["retained_nodes"] > 0


def test_byte_identical_reruns(tmp_path):
    cfg = write(tmp_path, FIG2.format(h=0.01))
    run_cli("run", cfg)
    first = (tmp_path / "out/fig2.csv").read_bytes()
    svg_first = (tmp_path / "out/fig2.svg").read_bytes()
    run_cli("run", cfg)
    assert (tmp_path / "out/fig2.csv").read_bytes() == first
    assert (tmp_path / "out/fig2.svg").read_bytes() == svg_first


def test_csv_round_trip(tmp_path):
    cfg = write(tmp_path, FIG2.format(h=0.01).replace("500.0", "20.0"))
    run_cli("run", cfg)
    raw = (tmp_path / "out/fig2.csv").read_text()
    _, times, states = read_csv(tmp_path / "out/fig2.csv")
    assert csv_text(times, states) == raw


def test_svg_is_xml_with_one_polyline(tmp_path):
    cfg = write(tmp_path, FIG2.format(h=0.01).replace("500.0", "20.0"))
    run_cli("run", cfg)
    root = ET.parse(tmp_path / "out/fig2.svg").getroot()
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 1
    pts = lines[0].get("points").split()
    assert len(pts) == 2001
    xy = np.array([[float(v) for v in p.split(",")] for p in pts])
    assert xy.min() >= 0 and xy.max() <= 600


def test_negative_step_rejected(tmp_path, capsys):
    cfg = write(tmp_path, FIG2.format(h=-0.01))
    code = run_cli("run", cfg)
    err = json.loads(capsys.readouterr().err)
    assert code != 0
    assert err["field"] == "grid.h"
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize(
    "patch,field",
    [
        (("[grid]", "[grid]\nstep = 0.1"), "grid.step"),
        (("[output]", "[plots]\nx = 1\n[output]"), "plots"),
        (('id = "lorenz"', 'id = "chua"'), "system.id"),
        (('preset = "fig2"', 'preset = "fig2"\nparams = { rho = 28.0 }'), "system.params.rho"),
        (('name = "LC"', 'name = "EULER"'), "scheme.name"),
        (('name = "LC"', 'name = "LC"\nmode = "exact"'), "scheme.mode"),
        (('preset = "fig2"', 'preset = "fig2"\ninitial = [1.0, 2.0]'), "system.initial"),
        (("[grid]", '[order]\nkind = "ramp"\nstart = 0.9\n[grid]'), "order.end"),
        (("[grid]", "[order]\nvalue = 1.4\n[grid]"), "order"),
    ],
)
def test_config_errors_name_field(tmp_path, capsys, patch, field):
    cfg = write(tmp_path, FIG2.format(h=0.01).replace(*patch, 1))
    assert run_cli("run", cfg) == 2
    assert json.loads(capsys.readouterr().err)["field"] == field


def test_bad_toml_and_missing_file(tmp_path, capsys):
    assert run_cli("run", write(tmp_path, "[system\nid=")) == 2
    assert json.loads(capsys.readouterr().err)["field"] == "<file>"
    assert run_cli("run", tmp_path / "nope.toml") == 2


def test_divergence_is_reported_not_an_error(tmp_path, capsys):
    text = FIG2.format(h=0.01).replace('name = "LC"', 'name = "CFC"').replace("500.0", "5.0")
    text = text.replace("[grid]", '[order]\nvalue = 0.9\n[grid]')
    assert run_cli("run", write(tmp_path, text)) == 0
    summary = json.loads((tmp_path / "out/fig2.json").read_text())
    assert isinstance(summary["diverged_at"], int)


def test_list_systems(capsys):
    assert run_cli("list-systems", "--json") == 0
    listing = json.loads(capsys.readouterr().out)
    assert [e["id"] for e in listing] == [
        "financial", "lorenz", "coupled-lorenz", "langford", "rossler", "shilnikov", "linear-probe",
    ]
    shil = next(e for e in listing if e["id"] == "shilnikov")
    assert shil["parameters"]["d"] == 0.0 and "d" in shil["notes"]
    fig2 = next(e for e in listing if e["id"] == "lorenz")["presets"]["fig2"]
    assert fig2["params"] == {"sigma": 10.0, "r": 30.0, "b": 8.0 / 3.0}
    assert all(p["provenance"] for e in listing for p in e["presets"].values())
    assert run_cli("list-systems") == 0
    text = capsys.readouterr().out
    assert "shilnikov  (dimension 3)" in text and "preset fig2" in text
    assert listing == catalog_listing()


def test_compare_three_schemes(tmp_path, capsys):
    cfg = write(tmp_path, COMPARE.format(names='["LC", "CFC", "ABC"]'))
    assert run_cli("compare", cfg) == 0
    out = capsys.readouterr().out
    rows = (tmp_path / "out/table.csv").read_text().strip().splitlines()
    assert out.strip().splitlines() == rows
    assert rows[0].startswith("scheme,mode,cf_normalization,elapsed_seconds,diverged_at,x1")
    assert len(rows) - 1 == 3
    ends = np.array([[float(v) for v in r.split(",")[5:]] for r in rows[1:]])
    assert np.max(np.abs(ends - ends[0])) < 1e-6
    for s in ("LC", "CFC", "ABC"):
        assert (tmp_path / f"out/cmp_{s}.csv").exists() and (tmp_path / f"out/cmp_{s}.svg").exists()


def test_compare_two_schemes_table(tmp_path):
    run_cli("compare", write(tmp_path, COMPARE.format(names='["LC", "RK4"]')))
    assert len((tmp_path / "out/table.csv").read_text().strip().splitlines()) == 3


@pytest.mark.parametrize("names", ['["LC"]', '["LC", "LC"]'])
def test_compare_rejects_single_scheme(tmp_path, capsys, names):
    assert run_cli("compare", write(tmp_path, COMPARE.format(names=names))) == 2
    assert json.loads(capsys.readouterr().err)["field"] == "scheme.names"


def test_sweep_writes_tagged_outputs(tmp_path, capsys):
    text = """
[system]
id = "coupled-lorenz"
preset = "sync"
[scheme]
name = "RK4"
[grid]
t_end = 20.0
h = 0.01
[output]
csv = "out/s.csv"
summary = "out/s.json"
[sweep]
param = "k"
values = [0.0, 10.0]
jobs = 2
"""
    assert run_cli("run", write(tmp_path, text)) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [json.loads(l)["sweep"]["value"] for l in lines] == [0.0, 10.0]
    s0 = json.loads((tmp_path / "out/s_k0.json").read_text())
    s1 = json.loads((tmp_path / "out/s_k1.json").read_text())
    assert s0["params"]["k"] == 0.0 and s1["params"]["k"] == 10.0
    assert not s0["diagnostics"]["sync"]["synchronized"]
    assert s1["diagnostics"]["sync"]["synchronized"]
    assert (tmp_path / "out/s_k0.csv").exists() and (tmp_path / "out/s_k1.csv").exists()


def test_lyapunov_only_for_order_one(tmp_path):
    text = FIG2.format(h=0.01).replace("500.0", "10.0") + "\n[diagnostics]\nlyapunov = true\nlyapunov_horizon = 200.0\nlyapunov_h = 0.01\n"
    run_cli("run", write(tmp_path, text))
    est = json.loads((tmp_path / "out/fig2.json").read_text())["diagnostics"]["lyapunov"]
    assert 0.5 < est < 1.5
    run_cli("run", write(tmp_path, text.replace("[grid]", "[order]\nvalue = 0.95\n[grid]")))
    diag = json.loads((tmp_path / "out/fig2.json").read_text())["diagnostics"]
    assert diag["lyapunov"] is None and "psi = 1" in diag["lyapunov_error"]


def test_relative_paths_follow_config_location(tmp_path):
    sub = tmp_path / "a" / "b"
    sub.mkdir(parents=True)
    cfg = load_config(write(sub, FIG2.format(h=0.01)), "run")
    assert cfg.output.csv == sub / "out/fig2.csv"


def test_load_config_defaults_from_preset(tmp_path):
    cfg = load_config(write(tmp_path, '[system]\nid = "lorenz"\npreset = "fig2"\n'), "run")
    assert (cfg.grid.h, cfg.grid.n_steps, cfg.initial) == (0.01, 50000, (0.1, 0.1, 0.1))
    assert cfg.order.is_constant and cfg.order.params[0] == 1.0
    assert cfg.scheme.as_dict()["mode"] == "reference"
    with pytest.raises(ConfigError) as info:
        load_config(write(tmp_path, '[system]\nid = "lorenz"\n'), "run")
    assert info.value.field == "grid"


@pytest.mark.parametrize("name", ["lorenz_compare.toml", "financial_variable_order.toml", "langford_ramp.toml"])
def test_shipped_configs_parse(name):
    cmd = "compare" if "compare" in name else "run"
    assert load_config(CONFIGS / name, cmd).grid.n_steps > 0


def test_console_entry_point(tmp_path):
    exe = shutil.which("vofrac")
    argv = [exe] if exe else [sys.executable, "-m", "vofrac"]
    proc = subprocess.run(argv + ["list-systems"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "coupled-lorenz" in proc.stdout
    bad = write(tmp_path, FIG2.format(h=-0.01))
    proc = subprocess.run(argv + ["run", str(bad)], capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and json.loads(proc.stderr)["field"] == "grid.h"
