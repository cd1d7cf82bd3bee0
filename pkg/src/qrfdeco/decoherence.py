"""Decoherence factor, timescale, reduced-state assembly and generalized overlap."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError, GridMismatchError, InvariantError, NoDecoherenceError
from .frames import FrameScenario, conditional_env_state, env_spec_in_frame_A, free_phases
from .states import (
    POSITIVITY_TOL,
    DensityMatrix,
    GaussianSpec,
    MomentumGrid,
    PhysicalParams,
    WaveFunction,
    check_edge_guard,
    make_gaussian,
)


class CurveLabel(str, Enum):
    NUMERIC = "numeric"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True, eq=False)
class DecoherenceCurve:
    times: np.ndarray
    gamma: np.ndarray
    tau: float
    label: CurveLabel
    overlap: np.ndarray | None = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ConfigurationError("curve times must be a strictly ascending 1-D sequence")
        g = np.asarray(self.gamma, dtype=complex)
        if g.shape != t.shape:
            raise GridMismatchError("gamma and times differ in length")
        if np.any(np.abs(g) > 1 + 1e-9):
            raise InvariantError("decoherence factor modulus exceeds 1")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "label", CurveLabel(self.label))

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.gamma)


def _control_rate(pi_B, pi_B_prime, params: PhysicalParams, t):
    return np.multiply(np.subtract(pi_B, pi_B_prime), t) / (params.hbar * params.m_C)


def gamma_numeric(phi0_C: WaveFunction, pi_B, pi_B_prime, params: PhysicalParams, t):
    """Grid quadrature of ``sum_j exp(-i pi_j (pi_B - pi_B') t / (hbar m_C)) |a_j|**2``.

    ``phi0_C`` is C's amplitude in frame A (already reflected).  Broadcasts
    over array-valued momenta or times.
    """
    check_edge_guard(phi0_C.amps, what="environment state")
    k = _control_rate(pi_B, pi_B_prime, params, t)
    w = phi0_C.probabilities
    p = phi0_C.grid.points
    if np.ndim(k) == 0:
        return complex(np.exp(-1j * float(k) * p) @ w)
    k = np.asarray(k, dtype=float)
    flat = np.exp(-1j * np.multiply.outer(k.ravel(), p)) @ w
    return flat.reshape(k.shape)


def gamma_refined(phi0_A: GaussianSpec, grid_C: MomentumGrid, pi_B, pi_B_prime, params: PhysicalParams, t,
                  factor: int = 4):
    """:func:`gamma_numeric` on a ``factor``-times oversampled grid built from the analytic spec."""
    wf = make_gaussian(grid_C.refined(factor), env_spec_in_frame_A(phi0_A, params))
    return gamma_numeric(wf, pi_B, pi_B_prime, params, t)


def decoherence_time(pi_B, pi_B_prime, delta_gamma0, m_C, hbar) -> float:
    """Gaussian decay time ``2 hbar m_C / (|pi_B - pi_B'| delta_gamma0)``.

    Raises NoDecoherenceError when either the momentum gap or the
    environment spread vanishes (infinite timescale).
    """
    gap = abs(pi_B - pi_B_prime)
    if delta_gamma0 < 0:
        raise ConfigurationError("environment width must be non-negative")
    if gap == 0:
        raise NoDecoherenceError("equal momenta never decohere (infinite timescale)")
    if delta_gamma0 == 0:
        raise NoDecoherenceError("a sharp environment momentum gives no decoherence (infinite timescale)")
    return 2.0 * hbar * m_C / (gap * delta_gamma0)


def decoherence_constant(delta_gamma0, m_C, hbar) -> float:
    """Gap-independent factor ``2 hbar m_C / delta_gamma0``; ``tau = constant / |pi_B - pi_B'|``."""
    if not delta_gamma0 > 0:
        raise NoDecoherenceError("environment width must be positive")
    return 2.0 * hbar * m_C / delta_gamma0


def gamma_gaussian(spec: GaussianSpec, pi_B, pi_B_prime, params: PhysicalParams, t):
    """Closed form for a Gaussian environment; ``spec`` is A's state in frame C.

    ``|Gamma| = exp(-(t/tau)**2)`` and the phase is ``exp(+i gamma0 dpi t / (hbar m_C))``
    for ``m_A = m_C``.  The phase sign is the one the quadrature produces.
    """
    env = env_spec_in_frame_A(spec, params)
    k = _control_rate(pi_B, pi_B_prime, params, t)
    # |a(pi)|**2 is normal with mean env.center and variance env.width**2 / 2
    val = np.exp(-1j * k * env.center - (k * env.width) ** 2 / 4.0)
    return complex(val) if np.ndim(val) == 0 else val


def gaussian_kernel(spec: GaussianSpec, params: PhysicalParams):
    """Kernel ``(pi_B, pi_B', t) -> Gamma`` for :func:`assemble_reduced_B`."""
    return lambda a, b, t: gamma_gaussian(spec, a, b, params, t)


def numeric_kernel(phi0_C: WaveFunction, params: PhysicalParams):
    """Quadrature kernel; evaluates each distinct momentum gap once."""

    def kernel(a, b, t):
        d = np.subtract(a, b)
        scale = max(float(np.max(np.abs(d))), 1e-300)
        key = np.round(d / scale, 12)
        uniq, inv = np.unique(key, return_inverse=True)
        vals = gamma_numeric(phi0_C, uniq * scale, 0.0, params, t)
        return np.asarray(vals).reshape(-1)[inv].reshape(d.shape)

    return kernel


def assemble_reduced_B(psi0_B: WaveFunction, gamma_kernel, t: float) -> DensityMatrix:
    """``rho[i, j] = Gamma(p_i, p_j, t) psi(p_i) conj(psi(p_j))``.

    A kernel that is not Hermitian-symmetric or not positive-compatible is
    reported through InvariantError, never repaired.
    """
    p = psi0_B.grid.points
    K = np.asarray(gamma_kernel(p[:, None], p[None, :], t), dtype=complex)
    if K.shape != (p.size, p.size):
        K = np.broadcast_to(K, (p.size, p.size))
    rho = K * np.outer(psi0_B.amps, psi0_B.amps.conj())
    return DensityMatrix(psi0_B.grid, rho).check_positive()


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    lam, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if lam[0] < -POSITIVITY_TOL:
        raise InvariantError(f"negative eigenvalue {lam[0]:.3e} in generalized overlap input")
    # roundoff-level eigenvalues would otherwise contribute sqrt(eps) each
    cut = lam.size * np.finfo(float).eps * max(lam[-1], 0.0)
    lam = np.where(lam > cut, lam, 0.0)
    return (V * np.sqrt(lam)) @ V.conj().T


def generalized_overlap(rho1, rho2) -> float:
    """``Tr sqrt(sqrt(rho2) rho1 sqrt(rho2))`` (square root of the Uhlmann fidelity).

    Arguments may be DensityMatrix or WaveFunction; two pure states reduce to
    ``|<phi|chi>|``.  For matrices the trace is taken as the nuclear norm of
    ``sqrt(rho1) sqrt(rho2)``, which avoids square-rooting roundoff eigenvalues.
    """
    g1, g2 = rho1.grid, rho2.grid
    if g1.n != g2.n or g1 != g2:
        raise GridMismatchError("generalized overlap needs states on the same grid")
    pure1, pure2 = isinstance(rho1, WaveFunction), isinstance(rho2, WaveFunction)
    if pure1 and pure2:
        val = abs(np.vdot(rho1.amps, rho2.amps))
    elif pure1 or pure2:
        psi, rho = (rho1, rho2) if pure1 else (rho2, rho1)
        val = math.sqrt(max(float(np.real(np.vdot(psi.amps, rho.elems @ psi.amps))), 0.0))
    else:
        s = np.linalg.svd(_psd_sqrt(rho1.elems) @ _psd_sqrt(rho2.elems), compute_uv=False)
        val = float(s.sum())
    return float(min(max(val, 0.0), 1.0))


def closed_form_curve(spec: GaussianSpec, pi_B, pi_B_prime, params: PhysicalParams, times) -> DecoherenceCurve:
    env = env_spec_in_frame_A(spec, params)
    tau = decoherence_time(pi_B, pi_B_prime, env.width, params.m_C, params.hbar)
    g = gamma_gaussian(spec, pi_B, pi_B_prime, params, np.asarray(times, dtype=float))
    return DecoherenceCurve(times, g, tau, CurveLabel.CLOSED_FORM)


def numeric_curve(phi0_C: WaveFunction, spec: GaussianSpec, pi_B, pi_B_prime, params: PhysicalParams,
                  times) -> DecoherenceCurve:
    env = env_spec_in_frame_A(spec, params)
    tau = decoherence_time(pi_B, pi_B_prime, env.width, params.m_C, params.hbar)
    g = gamma_numeric(phi0_C, pi_B, pi_B_prime, params, np.asarray(times, dtype=float))
    return DecoherenceCurve(times, g, tau, CurveLabel.NUMERIC)


def encoding_curve(scenario: FrameScenario, pi_B, pi_B_prime, times, as_density_matrices: bool = True
                   ) -> DecoherenceCurve:
    """Generalized overlap of the two conditional C states at each time, next to the quadrature Gamma.

    With ``as_density_matrices=False`` the conditional states are passed as
    pure vectors (fast path for large grids).
    """
    p = scenario.params
    env = env_spec_in_frame_A(scenario.phi0_A, p)
    phi_C = make_gaussian(scenario.grid_C, env)
    tau = decoherence_time(pi_B, pi_B_prime, env.width, p.m_C, p.hbar)
    overlaps, gammas = [], []
    for t in times:
        a = conditional_env_state(scenario, pi_B, t)
        b = conditional_env_state(scenario, pi_B_prime, t)
        if as_density_matrices:
            a, b = a.projector(), b.projector()
        overlaps.append(generalized_overlap(a, b))
        gammas.append(gamma_numeric(phi_C, pi_B, pi_B_prime, p, t))
    return DecoherenceCurve(times, np.array(gammas), tau, CurveLabel.NUMERIC, overlap=np.array(overlaps))


def evolved_psi_B(wf: WaveFunction, params: PhysicalParams, t: float) -> WaveFunction:
    """B's amplitude after free evolution, as it enters the frame-A reduced state."""
    return WaveFunction(wf.grid, wf.amps * free_phases(wf.grid, params.m_B, params.hbar, t))
