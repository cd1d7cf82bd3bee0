"""Scenario documents: INI parsing, validation, serialization and unit scaling.

A document has the sections ``[params]``, ``[state.B]``, ``[state.C]``,
``[state.C2]``, ``[grid.B]``, ``[grid.C]``, ``[times]``, ``[experiment]`` and
``[output]``.  ``[state.C]`` is the environment state as prepared in frame C
(the particle that becomes C once A is the reference).  Unknown sections and
keys are rejected.  See the README for every key and its default.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ConfigurationError, EdgeGuardError, NoDecoherenceError
from .frames import FrameScenario, env_spec_in_frame_A
from .states import CatSpec, GaussianSpec, MomentumGrid, PhysicalParams, UnitSystem, make_state

HBAR_SI = 1.054571817e-34
DEFAULT_GRID_N = 256
DEFAULT_GRID_HALF_WIDTH = 10.0  # in units of the state width


class ExperimentKind(str, Enum):
    GAMMA_CURVE = "gamma_curve"
    PURITY_CURVE = "purity_curve"
    ENCODING_CURVE = "encoding_curve"
    CAT_COMPARE = "cat_compare"
    SBS_SCAN = "sbs_scan"
    FRAME_COMPARE = "frame_compare"


class TimeUnits(str, Enum):
    ABSOLUTE = "absolute"
    TAU = "tau"


ALLOWED = {
    "params": {"hbar", "m_A", "m_B", "m_C", "units"},
    "state.B": {"kind", "center", "width", "beta", "beta_prime"},
    "state.C": {"kind", "center", "width"},
    "state.C2": {"kind", "center", "width"},
    "grid.B": {"p_min", "p_max", "n"},
    "grid.C": {"p_min", "p_max", "n"},
    "times": {"linspace", "values", "units"},
    "experiment": {"kind", "pi_B", "pi_B_prime", "branch_pair", "bins", "nbins", "coh_max", "overlap_max"},
    "output": {"name", "dir", "plot"},
}
REQUIRED_SECTIONS = ("state.B", "state.C", "times")


@dataclass(frozen=True)
class Scenario:
    """Validated scenario in the units of the document (natural or SI)."""

    params: PhysicalParams
    psi0_B: GaussianSpec | CatSpec
    phi0: GaussianSpec
    grid_B: MomentumGrid
    grid_C: MomentumGrid
    times: tuple
    kind: ExperimentKind = ExperimentKind.GAMMA_CURVE
    time_units: TimeUnits = TimeUnits.ABSOLUTE
    phi0_2: GaussianSpec | None = None
    pi_B: float | None = None
    pi_B_prime: float | None = None
    branch_pair: tuple = (0, 1)
    bins: tuple | None = None
    nbins: int | None = None
    thresholds: tuple = (0.05, 0.05)
    output_name: str | None = None
    output_dir: str = "out"
    plot: bool = True

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", tuple(float(x) for x in t.ravel()))
        object.__setattr__(self, "branch_pair", tuple(int(x) for x in self.branch_pair))
        if self.bins is not None:
            object.__setattr__(self, "bins", tuple(float(x) for x in self.bins))
        if t.ndim != 1 or t.size == 0:
            raise ConfigurationError("at least one time sample is required", key="times")
        if np.any(~np.isfinite(t)) or np.any(t < 0):
            raise ConfigurationError("time samples must be finite and non-negative", key="times")
        if np.any(np.diff(t) <= 0):
            raise ConfigurationError("time samples must be strictly ascending", key="times")
        if self.pi_B is not None and self.pi_B == self.pi_B_prime:
            raise ConfigurationError("pi_B equals pi_B_prime: no decoherence, tau is infinite", key="pi_B_prime")
        if self.time_units is TimeUnits.TAU and self.tau is None:
            raise ConfigurationError("times in units of tau need pi_B and pi_B_prime", key="units")
        k = self.kind
        if k in (ExperimentKind.GAMMA_CURVE, ExperimentKind.ENCODING_CURVE, ExperimentKind.CAT_COMPARE,
                 ExperimentKind.SBS_SCAN) and (self.pi_B is None or self.pi_B_prime is None):
            raise ConfigurationError(f"{k.value} needs pi_B and pi_B_prime", key="pi_B")
        if k is ExperimentKind.CAT_COMPARE and not isinstance(self.psi0_B, CatSpec):
            raise ConfigurationError("cat_compare needs state.B kind = cat", key="kind")
        if k is ExperimentKind.SBS_SCAN:
            if self.phi0_2 is None:
                raise ConfigurationError("sbs_scan needs a [state.C2] section", key="state.C2")
            if self.bins is None and self.nbins is None:
                raise ConfigurationError("sbs_scan needs bins or nbins", key="bins")
        if self.bins is not None and self.nbins is not None:
            raise ConfigurationError("give either bins or nbins, not both", key="nbins")
        if tuple(self.branch_pair) not in ((0, 0), (0, 1), (1, 0), (1, 1)):
            raise ConfigurationError("branch_pair entries must be 0 or 1", key="branch_pair")
        # validates grids against states (edge guards) in internal units
        try:
            self.frame_scenario()
        except EdgeGuardError as e:
            P = self.scales["momentum"]
            try:
                make_state(_scale_grid(self.grid_B, P), _scale_spec(self.psi0_B, P))
            except EdgeGuardError:
                raise ConfigurationError(f"grid.B too narrow for state.B: {e}", key="grid.B") from None
            raise ConfigurationError(f"grid.C too narrow for the environment: {e}", key="grid.C") from None

    @property
    def name(self) -> str:
        return self.output_name or self.kind.value

    # --- units -------------------------------------------------------------------------

    @property
    def scales(self) -> dict:
        """Momentum, mass and time scales; all 1 for natural units.

        SI documents use the environment width for momentum, ``m_C`` for mass
        and ``hbar m_C / width**2`` for time, so that hbar, m_C and the
        environment width are all 1 internally.
        """
        if self.params.unit_system is UnitSystem.NATURAL:
            return {"momentum": 1.0, "mass": 1.0, "time": 1.0}
        P = self.phi0.width
        M = self.params.m_C
        return {"momentum": P, "mass": M, "time": self.params.hbar * M / P**2}

    def frame_scenario(self) -> FrameScenario:
        """Frame scenario in internal (dimensionless for SI) units."""
        sc = self.scales
        P, M = sc["momentum"], sc["mass"]
        p = self.params
        hbar = 1.0 if p.unit_system is UnitSystem.SI else p.hbar
        params = PhysicalParams(hbar, p.m_A / M, p.m_B / M, p.m_C / M)
        return FrameScenario(
            params,
            _scale_spec(self.psi0_B, P),
            _scale_spec(self.phi0, P),
            _scale_grid(self.grid_B, P),
            _scale_grid(self.grid_C, P),
            None if self.phi0_2 is None else _scale_spec(self.phi0_2, P),
            None if self.phi0_2 is None else _scale_grid(self.grid_C, P),
        )

    @property
    def tau(self) -> float | None:
        """Decoherence time for ``pi_B, pi_B_prime`` in document units, or None."""
        if self.pi_B is None or self.pi_B_prime is None:
            return None
        env = env_spec_in_frame_A(self.phi0, self.params)
        gap = abs(self.pi_B - self.pi_B_prime)
        if gap == 0 or env.width == 0:
            raise NoDecoherenceError("pi_B equals pi_B_prime: infinite decoherence time")
        return 2.0 * self.params.hbar * self.params.m_C / (gap * env.width)

    def internal_control(self) -> tuple:
        P = self.scales["momentum"]
        return self.pi_B / P, self.pi_B_prime / P

    def internal_times(self) -> np.ndarray:
        """Time samples in internal units."""
        t = np.asarray(self.times, dtype=float)
        if self.time_units is TimeUnits.TAU:
            t = t * self.tau
        return t / self.scales["time"]

    def time_label(self) -> str:
        if self.time_units is TimeUnits.TAU:
            return "t [tau]"
        return "t [s]" if self.params.unit_system is UnitSystem.SI else "t [natural units]"


def _scale_spec(spec, P):
    if isinstance(spec, CatSpec):
        return CatSpec(spec.beta / P, spec.beta_prime / P, spec.width / P)
    return GaussianSpec(spec.center / P, spec.width / P)


def _scale_grid(g: MomentumGrid, P) -> MomentumGrid:
    return g if P == 1.0 else MomentumGrid(g.p_min / P, g.p_max / P, g.n)


# --- parsing ------------------------------------------------------------------------------


def _key_line(text: str, section: str, key: str | None) -> int | None:
    current = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return no
            continue
        if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return no
    return None


class _Reader:
    def __init__(self, cp: configparser.ConfigParser, text: str):
        self.cp, self.text = cp, text

    def err(self, section, key, msg):
        line = _key_line(self.text, section, key)
        where = f" (line {line})" if line else ""
        return ConfigurationError(f"[{section}] {key}: {msg}{where}", line=line, key=key)

    def has(self, section, key):
        return self.cp.has_section(section) and self.cp.has_option(section, key)

    def raw(self, section, key, default=None):
        return self.cp.get(section, key) if self.has(section, key) else default

    def float(self, section, key, default=None, required=False):
        v = self.raw(section, key)
        if v is None:
            if required:
                raise self.err(section, key, "missing required key")
            return default
        try:
            x = float(v)
        except ValueError:
            raise self.err(section, key, f"not a number: {v!r}") from None
        if not math.isfinite(x):
            raise self.err(section, key, "must be finite")
        return x

    def int(self, section, key, default=None):
        v = self.raw(section, key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError:
            raise self.err(section, key, f"not an integer: {v!r}") from None

    def floats(self, section, key):
        v = self.raw(section, key)
        try:
            return tuple(float(x) for x in v.split(",") if x.strip())
        except ValueError:
            raise self.err(section, key, f"not a comma-separated list of numbers: {v!r}") from None

    def choice(self, section, key, enum, default):
        v = self.raw(section, key)
        if v is None:
            return default
        try:
            return enum(v.strip())
        except ValueError:
            opts = ", ".join(e.value for e in enum)
            raise self.err(section, key, f"{v!r} is not one of {opts}") from None


def _spec(r: _Reader, section: str, allow_cat: bool):
    kind = (r.raw(section, "kind", "gaussian") or "").strip()
    if kind == "gaussian":
        for bad in ("beta", "beta_prime"):
            if r.has(section, bad):
                raise r.err(section, bad, "only valid for kind = cat")
        return GaussianSpec(r.float(section, "center", 0.0), r.float(section, "width", required=True))
    if kind == "cat" and allow_cat:
        if r.has(section, "center"):
            raise r.err(section, "center", "not valid for kind = cat (use beta, beta_prime)")
        return CatSpec(r.float(section, "beta", required=True), r.float(section, "beta_prime", required=True),
                       r.float(section, "width", required=True))
    raise r.err(section, "kind", f"unsupported state kind {kind!r}")


def _default_grid(spec, n=DEFAULT_GRID_N) -> MomentumGrid:
    h = DEFAULT_GRID_HALF_WIDTH * spec.width
    if isinstance(spec, CatSpec):
        lo, hi = min(spec.beta, spec.beta_prime), max(spec.beta, spec.beta_prime)
    else:
        lo = hi = spec.center
    return MomentumGrid(lo - h, hi + h, n)


def _grid(r: _Reader, section: str, default: MomentumGrid) -> MomentumGrid:
    if not r.cp.has_section(section):
        return default
    lo = r.float(section, "p_min", default.p_min)
    hi = r.float(section, "p_max", default.p_max)
    n = r.int(section, "n", default.n)
    try:
        return MomentumGrid(lo, hi, n)
    except ConfigurationError as e:
        raise r.err(section, "n" if n < 2 else "p_min", str(e)) from None


def _times(r: _Reader):
    has_lin, has_val = r.has("times", "linspace"), r.has("times", "values")
    if has_lin == has_val:
        raise r.err("times", "linspace", "give exactly one of linspace or values")
    if has_lin:
        parts = [x.strip() for x in r.raw("times", "linspace").split(",")]
        if len(parts) != 3:
            raise r.err("times", "linspace", "expected 't0, t1, n'")
        try:
            t0, t1, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise r.err("times", "linspace", "expected 't0, t1, n'") from None
        if n < 1:
            raise r.err("times", "linspace", "n must be positive")
        t = tuple(float(x) for x in np.linspace(t0, t1, n))
    else:
        t = r.floats("times", "values")
    units = r.choice("times", "units", TimeUnits, TimeUnits.ABSOLUTE)
    return t, units


def _bool(r: _Reader, section, key, default):
    v = r.raw(section, key)
    if v is None:
        return default
    s = v.strip().lower()
    if s in ("true", "yes", "1", "on"):
        return True
    if s in ("false", "no", "0", "off"):
        return False
    raise r.err(section, key, f"not a boolean: {v!r}")


def parse_config(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises ConfigurationError with ``line`` and ``key`` set when they can be
    located: syntax errors, duplicate keys, unknown sections or keys, bad
    values and cross-field violations.
    """
    cp = configparser.ConfigParser(strict=True, interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.DuplicateOptionError as e:
        raise ConfigurationError(f"duplicate key {e.option!r} in [{e.section}] (line {e.lineno})",
                                 line=e.lineno, key=e.option) from None
    except configparser.DuplicateSectionError as e:
        raise ConfigurationError(f"duplicate section [{e.section}] (line {e.lineno})",
                                 line=e.lineno, key=e.section) from None
    except configparser.MissingSectionHeaderError as e:
        raise ConfigurationError(f"text before the first section header (line {e.lineno})",
                                 line=e.lineno) from None
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigurationError(f"cannot parse line {line}", line=line) from None

    r = _Reader(cp, text)
    for sec in cp.sections():
        if sec not in ALLOWED:
            line = _key_line(text, sec, None)
            raise ConfigurationError(f"unknown section [{sec}] (line {line})", line=line, key=sec)
        for key in cp.options(sec):
            if key not in ALLOWED[sec]:
                raise r.err(sec, key, "unknown key")
    for sec in REQUIRED_SECTIONS:
        if not cp.has_section(sec):
            raise ConfigurationError(f"missing section [{sec}]", key=sec)

    units = r.choice("params", "units", UnitSystem, UnitSystem.NATURAL)
    si = units is UnitSystem.SI
    masses = {}
    for m in ("m_A", "m_B", "m_C"):
        masses[m] = r.float("params", m, None if si else 1.0, required=si)
    try:
        params = PhysicalParams(r.float("params", "hbar", HBAR_SI if si else 1.0), unit_system=units, **masses)
    except ConfigurationError as e:
        raise r.err("params", "hbar", str(e)) from None

    psi0 = _spec(r, "state.B", allow_cat=True)
    phi0 = _spec(r, "state.C", allow_cat=False)
    phi0_2 = _spec(r, "state.C2", allow_cat=False) if cp.has_section("state.C2") else None
    grid_B = _grid(r, "grid.B", _default_grid(psi0))
    grid_C = _grid(r, "grid.C", _default_grid(env_spec_in_frame_A(phi0, params)))
    times, t_units = _times(r)

    kind = r.choice("experiment", "kind", ExperimentKind, ExperimentKind.GAMMA_CURVE)
    if isinstance(psi0, GaussianSpec):
        d_pi = (psi0.center + 0.5 * psi0.width, psi0.center - 0.5 * psi0.width)
    else:
        d_pi = (None, None)
    pi_B = r.float("experiment", "pi_B", d_pi[0])
    pi_B_prime = r.float("experiment", "pi_B_prime", d_pi[1])
    branch_pair = (0, 1)
    if r.has("experiment", "branch_pair"):
        bp = r.floats("experiment", "branch_pair")
        if len(bp) != 2 or any(x not in (0.0, 1.0) for x in bp):
            raise r.err("experiment", "branch_pair", "expected two entries, each 0 or 1")
        branch_pair = (int(bp[0]), int(bp[1]))
    bins = r.floats("experiment", "bins") if r.has("experiment", "bins") else None
    nbins = r.int("experiment", "nbins")
    thresholds = (r.float("experiment", "coh_max", 0.05), r.float("experiment", "overlap_max", 0.05))

    plot = _bool(r, "output", "plot", True)
    try:
        return Scenario(params, psi0, phi0, grid_B, grid_C, times, kind, t_units, phi0_2, pi_B, pi_B_prime,
                        branch_pair, bins, nbins, thresholds, r.raw("output", "name"),
                        r.raw("output", "dir", "out"), plot)
    except ConfigurationError as e:
        if e.key in ALLOWED and e.line is None:
            e.line = _key_line(text, e.key, None)
        elif e.key and e.line is None:
            for sec in ALLOWED:
                line = _key_line(text, sec, e.key)
                if line:
                    e.line = line
                    break
        raise


# --- serialization ------------------------------------------------------------------------


def _f(x: float) -> str:
    return repr(float(x))


def dump_config(s: Scenario) -> str:
    """Serialize ``s`` so that ``parse_config(dump_config(s)) == s``."""
    p = s.params
    out = ["[params]", f"units = {p.unit_system.value}", f"hbar = {_f(p.hbar)}",
           f"m_A = {_f(p.m_A)}", f"m_B = {_f(p.m_B)}", f"m_C = {_f(p.m_C)}", ""]
    out += ["[state.B]"]
    if isinstance(s.psi0_B, CatSpec):
        c = s.psi0_B
        out += ["kind = cat", f"beta = {_f(c.beta)}", f"beta_prime = {_f(c.beta_prime)}", f"width = {_f(c.width)}"]
    else:
        out += ["kind = gaussian", f"center = {_f(s.psi0_B.center)}", f"width = {_f(s.psi0_B.width)}"]
    out += [""]
    for sec, spec in (("state.C", s.phi0), ("state.C2", s.phi0_2)):
        if spec is not None:
            out += [f"[{sec}]", "kind = gaussian", f"center = {_f(spec.center)}", f"width = {_f(spec.width)}", ""]
    for sec, g in (("grid.B", s.grid_B), ("grid.C", s.grid_C)):
        out += [f"[{sec}]", f"p_min = {_f(g.p_min)}", f"p_max = {_f(g.p_max)}", f"n = {g.n}", ""]
    out += ["[times]", "values = " + ", ".join(_f(t) for t in s.times), f"units = {s.time_units.value}", ""]
    out += ["[experiment]", f"kind = {s.kind.value}"]
    if s.pi_B is not None:
        out += [f"pi_B = {_f(s.pi_B)}"]
    if s.pi_B_prime is not None:
        out += [f"pi_B_prime = {_f(s.pi_B_prime)}"]
    out += [f"branch_pair = {s.branch_pair[0]}, {s.branch_pair[1]}"]
    if s.bins is not None:
        out += ["bins = " + ", ".join(_f(b) for b in s.bins)]
    if s.nbins is not None:
        out += [f"nbins = {s.nbins}"]
    out += [f"coh_max = {_f(s.thresholds[0])}", f"overlap_max = {_f(s.thresholds[1])}", ""]
    out += ["[output]"]
    if s.output_name is not None:
        out += [f"name = {s.output_name}"]
    out += [f"dir = {s.output_dir}", f"plot = {'true' if s.plot else 'false'}", ""]
    return "\n".join(out)


def with_output_dir(s: Scenario, out_dir: str) -> Scenario:
    return replace(s, output_dir=out_dir)
