import json
import subprocess
import sys

import pytest

from precs.cli import run
from precs.config import RunConfig
from precs.errors import ConfigError

BASE = {
    "model": "pure-dephasing",
    "omega": 1.0,
    "g": 0.2,
    "n_max": 20,
    "grid": {"R": 6.0, "h": 0.2},
    "integrator": {"dt": 0.01, "t_end": 1.0, "samples": 5},
    "initial_state": {"qubit": "x", "alpha0": [0.5, 0.2]},
    "gamma_curve": {"samples": 400},
}


def write_config(tmp_path, **over):
    cfg = dict(BASE, output=str(tmp_path / "out"), **over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.mark.parametrize(
    "args,files",
    [
        (["decompose"], ["field.csv", "decompose_report.json"]),
        (["lindblad-field", "--t", "0.5"], ["lindblad_field.csv", "lindblad_field_report.json"]),
        (["evolve", "--engine", "exact"], ["trajectory_exact.csv", "evolve_exact_report.json"]),
        (["evolve", "--engine", "gksl"], ["trajectory_gksl.csv", "evolve_gksl_report.json"]),
        (["evolve", "--engine", "decoupled"], ["trajectory_decoupled.csv", "evolve_decoupled_report.json"]),
        (["gamma-curve", "--g-list", "1,2"], ["gamma_curve_00.csv", "gamma_curve_01.csv", "gamma_fractions.csv"]),
    ],
)
def test_commands_write_outputs(tmp_path, args, files):
    cfg = write_config(tmp_path)
    assert run(args + ["--config", cfg]) == 0
    for f in files:
        assert (tmp_path / "out" / f).stat().st_size > 0


def test_lindblad_report_contents(tmp_path):
    cfg = write_config(tmp_path)
    run(["lindblad-field", "--t", "0.5", "--config", cfg])
    rep = json.loads((tmp_path / "out" / "lindblad_field_report.json").read_text())
    assert rep["all_finite"] and rep["trace_gksl_rhs"] < 1e-9 and rep["max_span_residual"] < 1e-8


def test_jaynes_cummings_gksl(tmp_path):
    cfg = write_config(tmp_path, model="jaynes-cummings", jc={"T_tilde": 1.0},
                       initial_state={"qubit": "-"})
    assert run(["evolve", "--engine", "gksl", "--config", cfg]) == 0
    rep = json.loads((tmp_path / "out" / "evolve_gksl_report.json").read_text())
    assert rep["max_trace_dev"] < 1e-9 and not rep["positivity_warning"]


def test_env_overrides_output(tmp_path, monkeypatch):
    cfg = write_config(tmp_path)
    monkeypatch.setenv("PRECS_OUT", str(tmp_path / "elsewhere"))
    assert run(["decompose", "--config", cfg]) == 0
    assert (tmp_path / "elsewhere" / "field.csv").exists()


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["decompose", "--config", str(bad)]) == 2
    assert run(["decompose", "--config", str(tmp_path / "missing.json")]) == 2
    assert run(["decompose", "--config", write_config(tmp_path, n_max=1)]) == 2
    assert "error" in capsys.readouterr().err


def test_coverage_error_exit_3(tmp_path, capsys):
    cfg = write_config(tmp_path, grid={"R": 1.0, "h": 0.1})
    assert run(["decompose", "--config", cfg]) == 3
    assert "deficit" in capsys.readouterr().err


def test_truncation_error_exit_3(tmp_path):
    cfg = write_config(tmp_path, initial_state={"alpha0": 4.0})
    assert run(["decompose", "--config", cfg]) == 3


def test_threads_option(tmp_path):
    assert run(["--threads", "1", "decompose", "--config", write_config(tmp_path)]) == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "precs", "decompose", "--config", write_config(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


@pytest.mark.parametrize(
    "patch",
    [
        {"model": "spin-boson"},
        {"grid": {"R": 1.0, "h": 2.0}},
        {"initial_state": {"qubit": "y"}},
        {"initial_state": {"alpha0": 0.1, "fock": 1}},
        {"branches": [{"weight": 0.4, "qubit": "+"}]},
        {"tolerances": {"bogus": 1}},
        {"surprise": 1},
        {"jc": {"H_tilde_eff": [[0, 1], [0, 0]]}},
    ],
)
def test_config_validation(patch):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(dict(BASE, **patch))


def test_config_defaults():
    cfg = RunConfig.from_dict({})
    assert cfg.model == "pure-dephasing" and cfg.n_max == 40 and cfg.times().size == 101
