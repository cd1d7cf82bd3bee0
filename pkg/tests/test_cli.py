import json
import subprocess
import sys

import pytest

from qrfdeco import acceptance, cli
from qrfdeco.acceptance import CriterionResult

from test_runner import DOCS, doc


def _write(tmp_path, text, name="scenario.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_run_success(tmp_path, capsys):
    cfg = _write(tmp_path, DOCS["gamma_curve"][0])
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0
    printed = capsys.readouterr().out.split()
    assert printed[-1].endswith("run_manifest.json")
    assert (tmp_path / "out" / "run.csv").exists()


def test_configuration_error_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, DOCS["gamma_curve"][0] + "bogus = 1\n")
    assert cli.main(["run", str(cfg)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_numerical_error_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, doc("purity_curve", m_B=1.0, b=(-8.0, 8.0), t1=40.0, units="absolute"))
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 3
    assert "frames" in capsys.readouterr().err


def test_io_error_exit_codes(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.ini")]) == 4
    cfg = _write(tmp_path, DOCS["gamma_curve"][0])
    blocker = _write(tmp_path, "", "not_a_dir")
    assert cli.main(["run", str(cfg), "--out", str(blocker / "sub")]) == 4


def test_fig2(tmp_path):
    assert cli.main(["fig2", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "fig2_manifest.json").read_text())
    assert manifest["units"] == "si" and abs(manifest["derived"]["tau"] - 1.054571817e5) < 1e-6
    assert (tmp_path / "fig2.svg").read_text().startswith("<?xml")


def test_check_exit_code_follows_criteria(monkeypatch, capsys):
    ok = lambda: CriterionResult(1, "ok", True, "fine")  # noqa: E731
    bad = lambda: CriterionResult(2, "bad", False, "off")  # noqa: E731
    monkeypatch.setattr(acceptance, "CRITERIA", (ok,))
    assert cli.main(["check"]) == 0
    monkeypatch.setattr(acceptance, "CRITERIA", (ok, bad))
    assert cli.main(["check"]) == 3
    out = capsys.readouterr().out
    assert "PASS [ 1]" in out and "FAIL [ 2]" in out


def test_console_script_usage():
    r = subprocess.run([sys.executable, "-m", "qrfdeco.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "fig2" in r.stdout
    r = subprocess.run([sys.executable, "-m", "qrfdeco.cli"], capture_output=True, text=True)
    assert r.returncode == 2
