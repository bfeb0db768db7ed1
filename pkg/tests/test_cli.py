from __future__ import annotations

import json
from pathlib import Path

import pytest

from mcpmev.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
ALL = ["envelope", "censorship", "steal", "auction", "timing", "poa", "spam", "multisub", "schedule", "simulate"]


def run(tmp_path, name, *extra, config=None):
    out = tmp_path / f"{name}.csv"
    cfg = config or CONFIGS / f"{name}.toml"
    code = main([name, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


@pytest.mark.parametrize("name", ALL)
def test_sample_configs_run(tmp_path, name):
    code, out = run(tmp_path, name)
    assert code == 0
    text = out.read_text()
    assert text.count("\n") >= 2
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text())
    assert manifest["subcommand"] == name


def test_envelope_rows(tmp_path):
    code, out = run(tmp_path, "envelope")
    assert code == 0
    rows = [r.split(",") for r in out.read_text().splitlines()]
    assert rows[0][:3] == ["tau", "envelope", "alpha_star"]
    assert rows[1][:3] == ["0", "0.5", "sat"]
    assert rows[2][0] == "0.5" and float(rows[2][1]) == pytest.approx(0.625)
    assert float(rows[2][2]) == pytest.approx(0.693147, abs=1e-6)
    assert rows[3][:3] == ["5", "5", "0"]


def test_schedule_puts_highest_tip_first(tmp_path):
    code, out = run(tmp_path, "schedule")
    assert code == 0
    order = [r.split(",")[2] for r in out.read_text().splitlines()[1:] if r.startswith("order,")]
    assert order == ["c", "a", "b"]


@pytest.mark.parametrize("name", ["simulate", "sigma_rho"])
def test_output_is_reproducible(tmp_path, name):
    cfg = CONFIGS / f"{name}.toml"
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_missing_config_exits_2(tmp_path):
    assert main(["envelope", "--config", str(tmp_path / "nope.toml")]) == 2


def test_kind_mismatch_exits_2(tmp_path):
    assert main(["poa", "--config", str(CONFIGS / "envelope.toml")]) == 2


def test_bad_value_exits_2(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('kind = "envelope"\nA = "one"\nk = 1.0\nlam = 1.0\ntaus = [0.5]\n')
    assert main(["envelope", "--config", str(cfg)]) == 2


def test_domain_error_exits_3(tmp_path):
    cfg = tmp_path / "poa.toml"
    cfg.write_text('kind = "poa"\nell = [0]\nmu_i = 1.0\nmu_j = 2.0\nbudgets = [1.0]\n')
    assert main(["poa", "--config", str(cfg)]) == 3


def test_missing_deadline_is_reported_not_fatal(tmp_path, capsys):
    cfg = tmp_path / "timing.toml"
    cfg.write_text('kind = "timing"\nW = 1.0\nw = 1.0\npi_ba = 0.4\npi_snipe = 0.8\nrho = "linear"\n')
    assert main(["timing", "--config", str(cfg)]) == 0
    assert "no deadline" in capsys.readouterr().err


def test_validate_subset(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert main(["validate", "--only", "4,12", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("criterion,") and len(lines) == 3
