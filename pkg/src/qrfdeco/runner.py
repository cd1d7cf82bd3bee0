"""Experiment drivers: compute a scenario's time series and write CSV, SVG and a manifest."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import traceback
from pathlib import Path

import numpy as np

from . import catstate, decoherence, frames, sbs, states
from .config import ExperimentKind, Scenario, TimeUnits, dump_config
from .errors import InvariantError, QRFError
from .plotting import PlotStyle, emit_plot
from .states import UnitSystem

MANIFEST_SCHEMA = "qrf-run-manifest/1"


def fmt(x) -> str:
    """17 significant digits, lowercase scientific; booleans as true/false."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return format(float(x), ".16e")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


# --- experiments: each returns (header, rows, plot series, ylabel, extra files) ------------


def _gamma_curve(s: Scenario):
    sc = s.frame_scenario()
    p = sc.params
    a, b = s.internal_control()
    env = frames.env_spec_in_frame_A(sc.phi0_A, p)
    phi = states.make_gaussian(sc.grid_C, env)
    rows = []
    for t_doc, t in zip(s.times, s.internal_times()):
        g = decoherence.gamma_gaussian(sc.phi0_A, a, b, p, t)
        gn = decoherence.gamma_numeric(phi, a, b, p, t)
        ov = decoherence.generalized_overlap(frames.env_state_for_momentum(sc, a, t),
                                             frames.env_state_for_momentum(sc, b, t))
        rows.append((t_doc, g.real, g.imag, abs(g), abs(gn), ov))
    header = ["t", "re_gamma", "im_gamma", "abs_gamma", "abs_gamma_numeric", "generalized_overlap"]
    series = [("closed form", [r[0] for r in rows], [r[3] for r in rows]),
              ("quadrature", [r[0] for r in rows], [r[4] for r in rows])]
    return header, rows, series, "|Gamma|", {}


def _purity_curve(s: Scenario):
    sc = s.frame_scenario()
    p = sc.params
    psi = states.make_state(sc.grid_B, sc.psi0_B)
    kernel = decoherence.numeric_kernel(states.make_gaussian(sc.grid_C, frames.env_spec_in_frame_A(sc.phi0_A, p)), p)
    rows = []
    for t_doc, t in zip(s.times, s.internal_times()):
        direct = states.purity(states.reduce(frames.to_frame_A(sc, t), "B"))
        rho = decoherence.assemble_reduced_B(decoherence.evolved_psi_B(psi, p, t), kernel, t)
        rows.append((t_doc, direct, states.purity(rho)))
    header = ["t", "purity_B_frame_A", "purity_B_assembled"]
    series = [("partial trace", [r[0] for r in rows], [r[1] for r in rows]),
              ("kernel assembly", [r[0] for r in rows], [r[2] for r in rows])]
    return header, rows, series, "purity of B", {}


def _encoding_curve(s: Scenario):
    sc = s.frame_scenario()
    p = sc.params
    a, b = s.internal_control()
    phi = states.make_gaussian(sc.grid_C, frames.env_spec_in_frame_A(sc.phi0_A, p))
    rows = []
    for t_doc, t in zip(s.times, s.internal_times()):
        gn = abs(decoherence.gamma_numeric(phi, a, b, p, t))
        ov = decoherence.generalized_overlap(frames.env_state_for_momentum(sc, a, t).projector(),
                                             frames.env_state_for_momentum(sc, b, t).projector())
        rows.append((t_doc, gn, ov, abs(ov - gn)))
    header = ["t", "abs_gamma_numeric", "generalized_overlap", "abs_difference"]
    series = [("|Gamma|", [r[0] for r in rows], [r[1] for r in rows]),
              ("generalized overlap", [r[0] for r in rows], [r[2] for r in rows])]
    return header, rows, series, "distinguishability", {}


def fit_gaussian_decay(t, modulus) -> float:
    """Least-squares fit of ``log|G| = c - (t/T)**2``; returns T."""
    t, m = np.asarray(t, dtype=float), np.asarray(modulus, dtype=float)
    keep = m > 0
    slope, _ = np.polyfit(t[keep] ** 2, np.log(m[keep]), 1)
    if not slope < 0:
        raise InvariantError("fitted decay slope is not negative")
    return math.sqrt(-1.0 / slope)


def _cat_compare(s: Scenario):
    sc = s.frame_scenario()
    p = sc.params
    a, b = s.internal_control()
    cat = sc.psi0_B
    branch = (cat.branches[s.branch_pair[0]], cat.branches[s.branch_pair[1]])
    rows = []
    for t_doc, t in zip(s.times, s.internal_times()):
        gc = abs(catstate.cat_gamma_closed(cat, sc.phi0_A, a, b, branch, p, t).total)
        gn = abs(catstate.cat_gamma_numeric(cat, sc.phi0_A, a, b, branch, p, t))
        rows.append((t_doc, gc, gn, abs(gc - gn) / gc))
    header = ["t", "abs_gamma_closed", "abs_gamma_numeric", "rel_err"]
    tt_abs = catstate.tau_tilde(a, b, cat, sc.phi0_A, p) * s.scales["time"]
    formula = tt_abs / (s.tau if s.time_units is TimeUnits.TAU else 1.0)
    fitted = fit_gaussian_decay([r[0] for r in rows], [r[2] for r in rows])
    summary = _csv(["tau_tilde_fit", "tau_tilde_formula", "rel_diff"],
                   [(fitted, formula, abs(fitted - formula) / formula)])
    series = [("closed form", [r[0] for r in rows], [r[1] for r in rows]),
              ("quadrature", [r[0] for r in rows], [r[2] for r in rows])]
    extra = {"summary": summary, "tau_tilde": tt_abs}
    return header, rows, series, "|Gamma~|", extra


def _sbs_scan(s: Scenario):
    sc = s.frame_scenario()
    P = s.scales["momentum"]
    if s.nbins is not None:
        binning = sbs.PointerBinning.uniform(sc.grid_B, s.nbins)
    else:
        binning = sbs.PointerBinning(sc.grid_B, tuple(e / P for e in s.bins))
    rows = []
    for t_doc, t in zip(s.times, s.internal_times()):
        r = sbs.sbs_report(*sbs.build_bc1(sc, t), binning, s.thresholds)
        c = sbs.sbs_report(*sbs.build_bc1_frame_c(sc, t), binning, s.thresholds)
        rows.append((t_doc, r.coherence_ratio, r.max_overlap, r.sbs_ok, c.coherence_ratio, c.max_overlap, c.sbs_ok))
    header = ["t", "coherence_ratio", "max_overlap", "sbs_ok",
              "coherence_ratio_frame_C", "max_overlap_frame_C", "sbs_ok_frame_C"]
    series = [("coherence ratio (A)", [r[0] for r in rows], [r[1] for r in rows]),
              ("max overlap (A)", [r[0] for r in rows], [r[2] for r in rows]),
              ("coherence ratio (C)", [r[0] for r in rows], [r[4] for r in rows])]
    return header, rows, series, "SBS diagnostics", {}


def _frame_compare(s: Scenario):
    sc = s.frame_scenario()
    rows = []
    for t_doc, t in zip(s.times, s.internal_times()):
        in_C = states.purity(states.reduce(frames.evolve_frame_C(sc, t), "B"))
        joint_A = frames.to_frame_A(sc, t)
        rows.append((t_doc, in_C, states.purity(states.reduce(joint_A, "B")), states.entanglement_entropy(joint_A)))
    header = ["t", "purity_B_frame_C", "purity_B_frame_A", "schmidt_entropy_frame_A"]
    series = [("frame C", [r[0] for r in rows], [r[1] for r in rows]),
              ("frame A", [r[0] for r in rows], [r[2] for r in rows])]
    return header, rows, series, "purity of B", {}


EXPERIMENTS = {
    ExperimentKind.GAMMA_CURVE: _gamma_curve,
    ExperimentKind.PURITY_CURVE: _purity_curve,
    ExperimentKind.ENCODING_CURVE: _encoding_curve,
    ExperimentKind.CAT_COMPARE: _cat_compare,
    ExperimentKind.SBS_SCAN: _sbs_scan,
    ExperimentKind.FRAME_COMPARE: _frame_compare,
}


# shared guards report on behalf of their caller
_GUARDS = {"check_edge_guard", "check_positive"}


def _failing_module(exc: BaseException) -> str | None:
    for frame in reversed(traceback.extract_tb(exc.__traceback__)):
        path = Path(frame.filename)
        if path.parent.name == "qrfdeco" and frame.name not in _GUARDS:
            return path.stem
    return None


def time_axis_note(s: Scenario) -> str:
    if s.time_units is TimeUnits.TAU:
        return "t is in units of tau = 2 hbar m_C / (|pi_B - pi_B_prime| width of the environment)"
    if s.params.unit_system is UnitSystem.SI:
        return "t is in seconds"
    return "t is in natural units (hbar and masses as given)"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def run_scenario(s: Scenario, out_dir: str | Path | None = None) -> list[Path]:
    """Run ``s`` and write its files; returns their paths, the manifest last.

    Files: ``<name>.csv``, ``<name>.svg`` (if plotting), ``<name>_summary.csv``
    (cat_compare only), ``<name>.ini`` (the normalized scenario) and
    ``<name>_manifest.json``.  Output is byte-identical for identical input.
    Errors from the numerical modules are re-raised with ``module`` set.
    """
    out = Path(out_dir if out_dir is not None else s.output_dir)
    try:
        header, rows, series, ylabel, extra = EXPERIMENTS[s.kind](s)
    except QRFError as e:
        e.module = _failing_module(e)
        raise
    files = {f"{s.name}.csv": _csv(header, rows)}
    if s.plot and len(rows) >= 2:
        units = s.params.unit_system.value
        style = PlotStyle(title=f"{s.kind.value} ({units} units)", xlabel=s.time_label(), ylabel=ylabel)
        files[f"{s.name}.svg"] = emit_plot(series, style)
    if "summary" in extra:
        files[f"{s.name}_summary.csv"] = extra["summary"]
    files[f"{s.name}.ini"] = dump_config(s)

    out.mkdir(parents=True, exist_ok=True)
    paths = []
    hashes = {}
    for fname, text in files.items():
        data = text.encode("utf-8")
        path = out / fname
        path.write_bytes(data)
        paths.append(path)
        hashes[fname] = _sha256(data)

    tau = s.tau
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "name": s.name,
        "experiment": s.kind.value,
        "units": s.params.unit_system.value,
        "inputs": {
            "params": {"hbar": s.params.hbar, "m_A": s.params.m_A, "m_B": s.params.m_B, "m_C": s.params.m_C},
            "pi_B": s.pi_B,
            "pi_B_prime": s.pi_B_prime,
            "n_times": len(s.times),
            "time_units": s.time_units.value,
            "config_file": f"{s.name}.ini",
        },
        "derived": {
            "tau": tau,
            "tau_tilde": extra.get("tau_tilde"),
            "internal_scales": s.scales,
        },
        "time_axis": time_axis_note(s),
        "columns": header,
        "files": {k: hashes[k] for k in sorted(hashes)},
    }
    mpath = out / f"{s.name}_manifest.json"
    mpath.write_bytes((json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8"))
    paths.append(mpath)
    return paths
