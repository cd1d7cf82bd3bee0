import csv
import hashlib
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qrfdeco.config import parse_config
from qrfdeco.errors import ConfigurationError, EdgeGuardError, QRFError
from qrfdeco.plotting import PlotStyle, emit_plot
from qrfdeco.runner import MANIFEST_SCHEMA, fit_gaussian_decay, fmt, run_scenario

BASE = """\
[params]
m_B = {m_B}

[state.B]
{state_B}

[state.C]
center = 2.0
width = 1.0

[grid.B]
p_min = {b_lo}
p_max = {b_hi}
n = {n_B}

[grid.C]
p_min = -10.0
p_max = 6.0
n = 128

[times]
linspace = 0, {t1}, 6
units = {units}

[experiment]
{experiment}

[output]
name = run
"""

GAUSS_B = "center = 0.0\nwidth = 1.0"
CAT_B = "kind = cat\nbeta = -1.0\nbeta_prime = 1.0\nwidth = 1.0"


def doc(kind, m_B=1e-8, state_B=GAUSS_B, b=(-8.0, 8.0), n_B=64, t1=2.0, units="tau", extra=""):
    experiment = f"kind = {kind}\npi_B = 0.5\npi_B_prime = -0.5\n{extra}"
    return BASE.format(m_B=m_B, state_B=state_B, b_lo=b[0], b_hi=b[1], n_B=n_B, t1=t1, units=units,
                       experiment=experiment)


SBS_DOC = """\
[params]
m_B = 1e-8

[state.B]
kind = cat
beta = -2.0
beta_prime = 2.0
width = 0.25

[state.C]
width = 1.0

[state.C2]
width = 1.0

[grid.B]
p_min = -5.0
p_max = 5.0
n = 60

[grid.C]
p_min = -8.0
p_max = 8.0
n = 96

[times]
linspace = 0, 5, 6
units = tau

[experiment]
kind = sbs_scan
pi_B = 2.0
pi_B_prime = -2.0
bins = -5, 0, 5

[output]
name = run
"""

DOCS = {
    "gamma_curve": (doc("gamma_curve"),
                    ["t", "re_gamma", "im_gamma", "abs_gamma", "abs_gamma_numeric", "generalized_overlap"]),
    "purity_curve": (doc("purity_curve", m_B=1.0, b=(-12.0, 12.0), n_B=128, t1=1.0, units="absolute"),
                     ["t", "purity_B_frame_A", "purity_B_assembled"]),
    "encoding_curve": (doc("encoding_curve"), ["t", "abs_gamma_numeric", "generalized_overlap", "abs_difference"]),
    "cat_compare": (doc("cat_compare", m_B=1.0, state_B=CAT_B, b=(-12.0, 12.0)),
                    ["t", "abs_gamma_closed", "abs_gamma_numeric", "rel_err"]),
    "sbs_scan": (SBS_DOC, ["t", "coherence_ratio", "max_overlap", "sbs_ok",
                           "coherence_ratio_frame_C", "max_overlap_frame_C", "sbs_ok_frame_C"]),
    "frame_compare": (doc("frame_compare", m_B=1.0, b=(-12.0, 12.0), n_B=128, t1=1.0, units="absolute"),
                      ["t", "purity_B_frame_C", "purity_B_frame_A", "schmidt_entropy_frame_A"]),
}


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("kind", sorted(DOCS))
def test_schema_and_determinism(kind, tmp_path):
    text, columns = DOCS[kind]
    s = parse_config(text)
    first = run_scenario(s, tmp_path / "a")
    second = run_scenario(s, tmp_path / "b")
    names = [p.name for p in first]
    assert names[0] == "run.csv" and names[-1] == "run_manifest.json" and "run.ini" in names
    for p, q in zip(first, second):
        assert p.read_bytes() == q.read_bytes()
    rows = _rows(first[0])
    assert rows[0] == columns and len(rows) == 7
    for r in rows[1:]:
        for v in r:
            assert v in ("true", "false") or "e" in v
    manifest = json.loads(first[-1].read_text())
    assert manifest["schema"] == MANIFEST_SCHEMA and manifest["experiment"] == kind
    assert manifest["columns"] == columns
    for fname, digest in manifest["files"].items():
        assert hashlib.sha256((tmp_path / "a" / fname).read_bytes()).hexdigest() == digest
    # the written scenario document reproduces the run
    assert parse_config((tmp_path / "a" / "run.ini").read_text()) == s


def test_gamma_curve_values(tmp_path):
    rows = _rows(run_scenario(parse_config(DOCS["gamma_curve"][0]), tmp_path)[0])[1:]
    t = np.array([float(r[0]) for r in rows])
    g = np.array([[float(x) for x in r[1:]] for r in rows])
    assert np.allclose(g[:, 2], np.exp(-(t**2)), atol=1e-12)
    assert np.allclose(np.hypot(g[:, 0], g[:, 1]), g[:, 2], atol=1e-15)
    assert np.allclose(g[:, 3], g[:, 2], atol=1e-9)
    assert np.allclose(g[:, 4], g[:, 2], atol=1e-7)


def test_frame_compare_values(tmp_path):
    rows = _rows(run_scenario(parse_config(DOCS["frame_compare"][0]), tmp_path)[0])[1:]
    pc = np.array([float(r[1]) for r in rows])
    pa = np.array([float(r[2]) for r in rows])
    assert np.allclose(pc, 1, atol=1e-12)
    assert np.all(pa < 1 - 1e-3)


def test_cat_summary(tmp_path):
    paths = run_scenario(parse_config(DOCS["cat_compare"][0]), tmp_path)
    summary = _rows(tmp_path / "run_summary.csv")
    assert summary[0] == ["tau_tilde_fit", "tau_tilde_formula", "rel_diff"]
    fit, formula, rel = (float(x) for x in summary[1])
    # equal masses, unit widths: tau~ = 2 sqrt(2) in absolute units, tau = 2
    assert abs(formula - math.sqrt(2)) < 1e-12
    assert rel < 1e-2
    manifest = json.loads(paths[-1].read_text())
    assert abs(manifest["derived"]["tau_tilde"] - 2 * math.sqrt(2)) < 1e-12
    rel_err = [float(r[3]) for r in _rows(tmp_path / "run.csv")[1:]]
    assert max(rel_err) < 1e-4


def test_sbs_scan_values(tmp_path):
    rows = _rows(run_scenario(parse_config(SBS_DOC), tmp_path)[0])[1:]
    assert rows[0][3] == "false" and rows[-1][3] == "true"
    assert all(r[6] == "false" for r in rows)


def test_no_plot(tmp_path):
    s = parse_config(DOCS["gamma_curve"][0].replace("name = run", "name = run\nplot = false"))
    assert not any(p.suffix == ".svg" for p in run_scenario(s, tmp_path))


def test_failing_module_is_named(tmp_path):
    # a large boost pushes B off its grid during the frame change
    s = parse_config(doc("purity_curve", m_B=1.0, b=(-8.0, 8.0), t1=40.0, units="absolute"))
    with pytest.raises(EdgeGuardError) as e:
        run_scenario(s, tmp_path)
    assert e.value.module == "frames"
    assert not (tmp_path / "run.csv").exists()


def test_fmt():
    assert fmt(1.0) == "1.0000000000000000e+00"
    assert fmt(-2.5) == "-2.5000000000000000e+00"
    assert fmt(True) == "true" and fmt(np.bool_(False)) == "false"
    assert fmt(0.1) != fmt(0.1 + 1e-17)


def test_fit_gaussian_decay():
    t = np.linspace(0, 3, 31)
    assert abs(fit_gaussian_decay(t, 0.7 * np.exp(-((t / 1.7) ** 2))) - 1.7) < 1e-12
    with pytest.raises(QRFError):
        fit_gaussian_decay(t, np.exp(t))


# --- plotting -------------------------------------------------------------------------------


def _svg(series, **kw):
    text = emit_plot(series, PlotStyle(**kw))
    return text, ET.fromstring(text.split("\n", 1)[1])


NS = "{http://www.w3.org/2000/svg}"


def test_plot_two_series_with_legend():
    t = np.linspace(0, 3, 20)
    text, root = _svg([("closed form", t, np.exp(-t**2)), ("quadrature", t, np.exp(-t**2))],
                      xlabel="t [tau]", ylabel="|Gamma|")
    lines = root.findall(f"{NS}polyline")
    assert [p.get("data-series") for p in lines] == ["closed form", "quadrature"]
    labels = [e.text for e in root.iter(f"{NS}text")]
    assert "closed form" in labels and "quadrature" in labels and "t [tau]" in labels
    assert emit_plot([("a", t, t)]) == emit_plot([("a", t, t)])


def test_single_series_has_no_legend():
    t = np.linspace(0, 1, 5)
    _, root = _svg([("only", t, t)])
    assert "only" not in [e.text for e in root.iter(f"{NS}text")]


def test_constant_curve_is_padded():
    t = np.linspace(0, 1, 5)
    _, root = _svg([("flat", t, np.full(5, 2.0))])
    ys = {float(p.split(",")[1]) for p in root.find(f"{NS}polyline").get("points").split()}
    assert len(ys) == 1
    ticks = [float(e.text) for e in root.iter(f"{NS}text") if e.get("text-anchor") == "end"]
    assert min(ticks) == pytest.approx(1.9) and max(ticks) == pytest.approx(2.1)
    # y = 0 everywhere still gives a usable axis
    emit_plot([("zero", t, np.zeros(5))])


@pytest.mark.parametrize(
    "series",
    [
        [],
        [("one point", [0.0], [1.0])],
        [("nan", [0.0, 1.0], [1.0, math.nan])],
        [("same x", [1.0, 1.0], [0.0, 1.0])],
        [("shape", [0.0, 1.0, 2.0], [0.0, 1.0])],
    ],
)
def test_plot_errors(series):
    with pytest.raises(ConfigurationError):
        emit_plot(series)
