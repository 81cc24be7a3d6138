"""Command-line driver: argument handling, output formats, exit codes."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

import omit_lab as ol
from omit_lab import cli
from omit_lab.sweep import CSV_COLUMNS


@pytest.fixture()
def config_file(tmp_path, split_config):
    path = tmp_path / "system.cfg"
    ol.save_config(split_config, path)
    return str(path)


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert ol.__version__ in capsys.readouterr().out


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["resonate"])
    assert exc.value.code == 2


def test_spectrum_csv_to_stdout(config_file, capsys):
    assert cli.main(["spectrum", "--config", config_file,
                     "--omega-grid", "0.9:1.1:51"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 52


def test_spectrum_json_to_file(config_file, tmp_path, capsys):
    out = tmp_path / "spec.json"
    assert cli.main(["spectrum", "--config", config_file,
                     "--omega-grid", "0.95:1.05:21", "--format", "json",
                     "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    data = json.loads(out.read_text(encoding="utf-8"))
    assert list(data["columns"]) == list(CSV_COLUMNS)
    assert len(data["columns"]["transmission"]) == 21


def test_missing_config_exits_2(tmp_path, capsys):
    assert cli.main(["spectrum", "--config",
                     str(tmp_path / "absent.cfg")]) == 2
    assert "error" in capsys.readouterr().err.lower()


def test_bad_grid_exits_2(config_file):
    assert cli.main(["spectrum", "--config", config_file,
                     "--omega-grid", "0.9:1.1"]) == 2


def test_numerical_failure_exits_3(config_file, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise ol.SingularSystemError("response singular at requested point")
    monkeypatch.setattr(cli, "compute_spectrum", boom)
    assert cli.main(["spectrum", "--config", config_file]) == 3
    assert "singular" in capsys.readouterr().err


def test_darkmode_report(config_file, capsys):
    assert cli.main(["darkmode", "--config", config_file]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["dark_mode_broken"] is True
    assert data["steady"]["photon_number"] > 0
    assert data["hybrid"]["g_plus"] > 0
    assert data["predicted_linewidth_rad_s"] is None  # needs eta == 0
    assert data["prediction_skipped"]


def test_darkmode_three_modes_exits_4(tmp_path, capsys):
    path = tmp_path / "chain3.cfg"
    ol.save_config(ol.standard_setup(3, eta_frac=0.05), path)
    assert cli.main(["darkmode", "--config", str(path)]) == 4
    assert "two" in capsys.readouterr().err


def test_nmode_count_only(capsys):
    assert cli.main(["nmode", "--n", "3", "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "3"
    # Unbroken three-mode chain: k = 2 is dark, k = 1 and 3 stay bright.
    assert cli.main(["nmode", "--n", "3", "--theta-pi", "0",
                     "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert cli.main(["nmode", "--n", "2", "--theta-pi", "0",
                     "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_nmode_basis_json(capsys):
    assert cli.main(["nmode", "--n", "2", "--theta-pi", "0", "--basis"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["n"] == 2
    assert len(data["frequencies_rad_s"]) == 2
    assert data["dark_mode_indices"] == [2]


def test_sweep_cli_writes_bundle(config_file, tmp_path, capsys):
    out_dir = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", config_file,
                     "--param", "theta_pi_units", "--values", "0,0.5",
                     "--omega-grid", "0.9:1.1:101", "--no-second-order",
                     "--out-dir", str(out_dir)]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert (out_dir / "bundle.json").exists()
    assert (out_dir / "manifest.json").exists()
    assert (out_dir / "point_000.csv").exists()
    assert str(out_dir / "point_001.csv") in printed


def test_sweep_values_range_exclusive(config_file, tmp_path):
    assert cli.main(["sweep", "--config", config_file,
                     "--param", "power_pump_w", "--values", "1e-3",
                     "--range", "1e-4:1e-3:3",
                     "--out-dir", str(tmp_path / "x")]) == 2


def test_oracle_cli(config_file, tmp_path):
    out = tmp_path / "closure.json"
    assert cli.main(["oracle", "--config", config_file,
                     "--omega-frac", "0.95", "--periods", "120",
                     "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["reliable"] is True
    assert report["rel_err_first"] < 0.01


def test_figure_preset_cli(tmp_path, capsys):
    out_dir = tmp_path / "fig4"
    assert cli.main(["figure", "fig4", "--out-dir", str(out_dir)]) == 0
    printed = [line for line in capsys.readouterr().out.splitlines() if line]
    assert printed
    for line in printed:
        assert Path(line).exists()
    assert (out_dir / "fig4_windows_vs_theta.csv").exists()
