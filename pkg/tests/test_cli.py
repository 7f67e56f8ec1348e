"""CLI wiring: fast subcommands, output files, assertion exit codes."""

import json

import pytest

from odbsim.cli import main


def test_adiabaticity_subcommand(tmp_path, capsys):
    code = main(["adiabaticity", "--out", str(tmp_path), "--assert"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[PASS] metric_down" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["experiment"] == "adiabaticity"
    assert report["fc_rate"]["rate_khz_per_us"] == pytest.approx(55.0)


def test_pulse_export_subcommand(tmp_path, capsys):
    code = main(["pulse-export", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "pulse_fc0_down.csv").exists()
    assert (tmp_path / "pulse_fc1_up.csv").exists()
    header = (tmp_path / "pulse_fc1_up.csv").read_text().splitlines()[0]
    assert header == "t[s],b,bdot,bddot,omega[rad/s]"


def test_config_flag(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("t_fc_us = 8.0\n")
    code = main(["adiabaticity", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["t_fc_us"] == 8.0
    assert report["fc_rate"]["rate_khz_per_us"] == pytest.approx(27.5)
