"""Decoherence of a two-branch momentum cat in frame A.

B starts as a superposition of two Gaussians.  The controlled boost shears
each branch by ``(m_B/m_C) pi_C``, so the C states attached to B momenta
now also depend on the branch:

    Gt(pi_B, pi_B', b, b', t) = int dpi exp(-i k pi) exp(s sigma pi / D_b**2)
                                 exp(-(s pi / D_b)**2) |phi(pi)|**2

with ``k = (pi_B - pi_B') t / (hbar m_C)``, ``s = m_B/m_C``,
``sigma = pi_B + pi_B' - b - b'`` and ``phi`` C's amplitude in frame A.
The integral is Gaussian and splits into a branch-independent factor and a
branch factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ParameterRegimeError
from .frames import FrameScenario, env_spec_in_frame_A, free_phases
from .states import CatSpec, DensityMatrix, GaussianSpec, MomentumGrid, PhysicalParams

BRANCH_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class CatGammaParts:
    gamma_pi: complex
    gamma_branch: complex
    total: complex
    tau_tilde: float


def tau_tilde(pi_B, pi_B_prime, cat: CatSpec, env: GaussianSpec, params: PhysicalParams) -> float:
    """Leading Gaussian decay time of the cat decoherence factor.

    ``2 hbar m_C sqrt(1/w**2 + s**2/D_b**2) / |dpi|``; for equal masses
    ``2 hbar m sqrt(D_g**2 + D_b**2) / (|dpi| D_g D_b)``.
    """
    gap = abs(pi_B - pi_B_prime)
    if gap == 0:
        return math.inf
    w = env_spec_in_frame_A(env, params).width
    s = params.m_B / params.m_C
    A = 1.0 / w**2 + s**2 / cat.width**2
    return 2.0 * params.hbar * params.m_C * math.sqrt(A) / gap


def _pieces(cat, env, pi_B, pi_B_prime, branch, params, t):
    envA = env_spec_in_frame_A(env, params)
    c, w = envA.center, envA.width
    s = params.m_B / params.m_C
    db2 = cat.width**2
    A = 1.0 / w**2 + s**2 / db2
    u = np.add(pi_B, pi_B_prime)
    v = branch[0] + branch[1]
    k = np.subtract(pi_B, pi_B_prime) * t / (params.hbar * params.m_C)
    b_pi = 2.0 * c / w**2 + s * u / db2
    b_br = -s * v / db2
    return A, w, c, b_pi, b_br, k


def cat_gamma_closed(cat: CatSpec, env: GaussianSpec, pi_B, pi_B_prime, branch, params: PhysicalParams, t,
                     printed: bool = False) -> CatGammaParts:
    """Closed form of the cat decoherence factor, split as ``gamma_pi * gamma_branch``.

    ``branch`` is the pair of branch centres ``(b, b')``.  The default is
    the exact Gaussian integral for arbitrary ``m_B/m_C``.  ``printed=True``
    evaluates the equal-mass expressions in the form they are usually quoted,
    which differ from the exact integral unless ``D_g = D_b = 1`` and
    ``gamma0 = 0``; it exists so that the discrepancy can be tested.
    """
    if printed:
        return _printed(cat, env, pi_B, pi_B_prime, branch, params, t)
    log_pi, log_br = _log_parts(cat, env, pi_B, pi_B_prime, branch, params, t)
    g_pi, g_br = np.exp(log_pi), np.exp(log_br)
    return CatGammaParts(_c(g_pi), _c(g_br), _c(np.exp(log_pi + log_br)),
                         tau_tilde(pi_B, pi_B_prime, cat, env, params) if np.ndim(log_pi) == 0 else math.nan)


def _log_parts(cat, env, pi_B, pi_B_prime, branch, params, t):
    """Complex logarithms of the two factors of the closed form."""
    A, w, c, b_pi, b_br, k = _pieces(cat, env, pi_B, pi_B_prime, branch, params, t)
    q = 1.0 / (4.0 * A)
    log_pi = (b_pi**2 - k**2 - 2j * k * b_pi) * q - c**2 / w**2 - math.log(w * math.sqrt(A))
    log_br = (2.0 * b_pi * b_br + b_br**2 - 2j * k * b_br) * q
    return log_pi, log_br


def _printed(cat, env, pi_B, pi_B_prime, branch, params, t):
    if not (params.m_A == params.m_B == params.m_C):
        raise ConfigurationError("the quoted cat formulas assume m_A = m_B = m_C")
    hbar, m = params.hbar, params.m_C
    g0, dg, db = env.center, env.width, cat.width
    dg2, db2 = dg**2, db**2
    D = dg2 * db2 / (4 * (dg2 + db2))
    u = np.add(pi_B, pi_B_prime)
    dpi = np.subtract(pi_B, pi_B_prime)
    v = branch[0] + branch[1]
    g_pi0 = math.sqrt(dg2 / (db2 + dg2)) * np.exp(D * (4 * g0 * u / (dg2 * db2) + u**2 / db2 - 4 * g0**2 / (dg2 * db2)))
    g_pi = g_pi0 * np.exp(D * (-(dpi**2) * t**2 / (hbar**2 * m**2)
                               - 2j / hbar * dpi * t / m * (2 * g0 / dg2 + u / db2)))
    g_br0 = np.exp(D * (-4 * g0 * v / (dg2 * db2) + (v / db2) ** 2 - 2 * v / db2 * u))
    g_br = g_br0 * np.exp(1j * dg2 * dpi * v * t / (2 * hbar * m * (dg2 + db2)))
    tt = 2 * hbar * m * math.sqrt(dg2 + db2) / (abs(float(dpi)) * dg * db) if np.ndim(dpi) == 0 and dpi != 0 else math.inf
    return CatGammaParts(_c(g_pi), _c(g_br), _c(g_pi * g_br), tt)


def _c(x):
    return complex(x) if np.ndim(x) == 0 else np.asarray(x, dtype=complex)


def integrand_grid(cat: CatSpec, env: GaussianSpec, pi_B, pi_B_prime, branch, params: PhysicalParams,
                   n: int = 4096, span: float = 16.0) -> MomentumGrid:
    """Grid centred on the real Gaussian envelope of the integrand, ``span`` standard deviations each way."""
    A, w, c, b_pi, b_br, _ = _pieces(cat, env, pi_B, pi_B_prime, branch, params, 0.0)
    mu = float(b_pi + b_br) / (2 * A)
    sd = 1.0 / math.sqrt(2 * A)
    return MomentumGrid(mu - span * sd, mu + span * sd, n)


def cat_gamma_numeric(cat: CatSpec, env: GaussianSpec, pi_B, pi_B_prime, branch, params: PhysicalParams, t,
                      grid: MomentumGrid | None = None, oversample: int = 4) -> complex:
    """Riemann-sum quadrature of the defining integral.

    The linear and quadratic exponents are combined with ``log |phi|**2``
    before exponentiating.  Raises ParameterRegimeError if the combined
    exponent would overflow or the integrand has not decayed at the grid ends.
    """
    if grid is None:
        grid = integrand_grid(cat, env, pi_B, pi_B_prime, branch, params, n=1024 * oversample)
    envA = env_spec_in_frame_A(env, params)
    s = params.m_B / params.m_C
    x = grid.points
    sigma = pi_B + pi_B_prime - branch[0] - branch[1]
    log_env = -((x - envA.center) ** 2) / envA.width**2 - 0.5 * math.log(np.pi * envA.width**2)
    log_real = log_env + sigma * s * x / cat.width**2 - (s * x / cat.width) ** 2
    top = log_real.max()
    if top > 700:
        raise ParameterRegimeError(f"linear exponent overwhelms the envelope (log-integrand {top:.1f})")
    if max(log_real[0], log_real[-1]) > top - 36.0:
        raise ParameterRegimeError("integrand has not decayed at the grid ends; the shear pushes it off the grid")
    k = (pi_B - pi_B_prime) * t / (params.hbar * params.m_C)
    return complex(np.sum(np.exp(log_real - 1j * k * x)) * grid.dp)


def cat_reduced_B(scenario: FrameScenario, t: float, normalize: bool = True) -> DensityMatrix | np.ndarray:
    """Reduced B state in frame A from the four branch-pair kernels.

    Includes B's free phase so that it matches the partial trace of the
    frame-A state entrywise.  With ``normalize=False`` the raw matrix (with
    the analytic ``N`` and Gaussian prefactors) is returned instead, whose
    trace should already be 1 up to discretization.
    """
    cat = scenario.psi0_B
    if not isinstance(cat, CatSpec):
        raise ConfigurationError("cat_reduced_B needs a CatSpec for B")
    p, grid = scenario.params, scenario.grid_B
    x = grid.points
    rho = np.zeros((x.size, x.size), dtype=complex)
    for a, b in BRANCH_PAIRS:
        bb = (cat.branches[a], cat.branches[b])
        # far from the branches the kernel overflows while the branch weights
        # underflow, so the exponents are added before exponentiating
        log_pi, log_br = _log_parts(cat, scenario.phi0_A, x[:, None], x[None, :], bb, p, t)
        log_w = -((x[:, None] - bb[0]) ** 2 + (x[None, :] - bb[1]) ** 2) / (2 * cat.width**2)
        rho += np.exp(log_pi + log_br + log_w)
    ph = free_phases(grid, p.m_B, p.hbar, t)
    rho *= np.outer(ph, ph.conj()) * grid.dp / (cat.norm * math.sqrt(np.pi) * cat.width)
    if not normalize:
        return rho
    rho /= np.trace(rho).real
    return DensityMatrix(grid, rho).check_positive()
