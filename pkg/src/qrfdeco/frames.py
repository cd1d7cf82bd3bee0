"""Change of quantum reference frame from C to A for the generalized Galilean boost.

Frame C sees two free particles A and B in a product state.  Frame A sees
B and C.  The map between them swaps A for C with reversed velocity and
couples C's momentum to B's boost generator ``G_B = p_B t - m_B x_B``.

Two routes to the frame-A state are provided:

* :func:`to_frame_A` applies the controlled boost to the initial frame-A
  product state and then evolves freely (the propagated form).
* :func:`galilean_frame_change` applies the frame-change unitary factor by
  factor to the frame-C evolved state.

The two differ whenever ``t > 0`` because the boost generator does not
commute with B's kinetic energy; see the README for the algebra.  On a
periodic grid the factor-by-factor route reproduces that algebra only while
B's free drift ``p t / m_B`` fits inside the position window ``2 pi hbar / dp``;
for very light B it wraps, and the route lands close to the propagated form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GridMismatchError
from .states import (
    CatSpec,
    GaussianSpec,
    JointWaveFunction,
    MomentumGrid,
    PhysicalParams,
    WaveFunction,
    check_edge_guard,
    make_gaussian,
    make_state,
    product,
)


@dataclass(frozen=True)
class FrameScenario:
    """Initial data in frame C: ``|phi0>_A (x) |psi0>_B``, plus the grids used in frame A.

    ``phi0_A2``/``grid_C2`` add a second environment degree of freedom
    (A and C each made of two particles, coupled through their total momentum).
    """

    params: PhysicalParams
    psi0_B: GaussianSpec | CatSpec
    phi0_A: GaussianSpec
    grid_B: MomentumGrid
    grid_C: MomentumGrid
    phi0_A2: GaussianSpec | None = None
    grid_C2: MomentumGrid | None = None

    def __post_init__(self):
        if (self.phi0_A2 is None) != (self.grid_C2 is None):
            raise ConfigurationError("second environment needs both phi0_A2 and grid_C2")
        # edge guard for every factor
        make_state(self.grid_B, self.psi0_B)
        make_gaussian(self.grid_C, env_spec_in_frame_A(self.phi0_A, self.params))
        if self.phi0_A2 is not None:
            make_gaussian(self.grid_C2, env_spec_in_frame_A(self.phi0_A2, self.params))

    @property
    def has_second_environment(self) -> bool:
        return self.phi0_A2 is not None


def free_phases(grid: MomentumGrid, mass: float, hbar: float, t: float) -> np.ndarray:
    """``exp(-i p**2 t / (2 m hbar))`` on the grid."""
    p = grid.points
    return np.exp(-1j * (p * p) * (t / (2.0 * mass * hbar)))


def env_spec_in_frame_A(phi0_A: GaussianSpec, params: PhysicalParams) -> GaussianSpec:
    """Spec of C's momentum amplitude after the velocity-reversing swap A -> C.

    Velocity is reversed: ``pi_C / m_C = -p_A / m_A``.  The resulting
    amplitude ``sqrt(m_A/m_C) phi0(-(m_A/m_C) pi_C)`` is again Gaussian,
    which lets the grid be sampled analytically instead of resampled.
    """
    r = params.m_C / params.m_A
    return GaussianSpec(center=-phi0_A.center * r, width=phi0_A.width * r)


def parity_swap_velocity(scenario: FrameScenario) -> JointWaveFunction:
    """Initial frame-A state: B unchanged, C carrying A's reflected (and mass-dilated) amplitude."""
    wf_B = make_state(scenario.grid_B, scenario.psi0_B)
    wf_C = make_gaussian(scenario.grid_C, env_spec_in_frame_A(scenario.phi0_A, scenario.params))
    return product(wf_B, wf_C)


def evolve_free(joint: JointWaveFunction, params: PhysicalParams, t: float) -> JointWaveFunction:
    """Free evolution of both factors; diagonal in momentum."""
    if t < 0:
        raise ValueError("t must be non-negative")
    ph_B = free_phases(joint.grid_B, params.m_B, params.hbar, t)
    ph_C = free_phases(joint.grid_C, params.m_C, params.hbar, t)
    return JointWaveFunction(joint.grid_B, joint.grid_C, joint.amps * ph_B[:, None] * ph_C[None, :])


def _controlled_boost(amps: np.ndarray, grid_B: MomentumGrid, pi_C, params: PhysicalParams, t: float) -> np.ndarray:
    """Apply ``exp(-(i/hbar)(pi_C/m_C) G_B)`` to each slice of ``amps`` along axes 1..

    ``amps`` has B on axis 0; ``pi_C`` broadcasts against the trailing axes.
    Applied in the order scalar phase, B-diagonal phase, then momentum
    translation by ``(m_B/m_C) pi_C``; with the translation acting last this
    product is exactly the exponential of the sum.
    """
    hbar, m_B, m_C = params.hbar, params.m_B, params.m_C
    pi_C = np.asarray(pi_C, dtype=float)
    pad = (None,) * amps.ndim
    pB = grid_B.points[(slice(None),) + pad[1:]]
    ratio = m_B / m_C
    scalar = np.exp(-1j * ratio * pi_C**2 * t / (2.0 * m_C * hbar))
    diag = np.exp(-1j * pi_C[None, ...] * pB * (t / (m_C * hbar)))
    a = amps * scalar[None, ...] * diag
    shift = ratio * pi_C
    x = grid_B.positions[(slice(None),) + pad[1:]]
    a = np.fft.ifft(np.fft.fft(a, axis=0) * np.exp(1j * shift[None, ...] * x), axis=0)
    return a


def galilean_coupling(joint: JointWaveFunction, params: PhysicalParams, t: float) -> JointWaveFunction:
    """Controlled boost of B by C's momentum, column by column.

    The translation is an exact band-limited (Fourier) shift, so the edge
    guard is re-checked on the output.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    a = _controlled_boost(joint.amps, joint.grid_B, joint.grid_C.points, params, t)
    check_edge_guard(a, axis=0, what="galilean_coupling output (B axis)")
    return JointWaveFunction(joint.grid_B, joint.grid_C, a)


def to_frame_A(scenario: FrameScenario, t: float) -> JointWaveFunction:
    """Frame-A state at time ``t``: controlled boost of the initial swap state, then free evolution."""
    p = scenario.params
    return evolve_free(galilean_coupling(parity_swap_velocity(scenario), p, t), p, t)


def conditional_env_states(scenario: FrameScenario, t: float, env: int = 1) -> np.ndarray:
    """Rows are C states ``|phi_{pi_B}(t)>`` for every point of ``grid_B``.

    These neglect the B translation (the sharp-position regime) and carry
    only C's free phase and the B-controlled phase.
    """
    p = scenario.params
    spec, grid = (scenario.phi0_A, scenario.grid_C) if env == 1 else (scenario.phi0_A2, scenario.grid_C2)
    if spec is None:
        raise ConfigurationError("scenario has no second environment")
    base = make_gaussian(grid, env_spec_in_frame_A(spec, p)).amps * free_phases(grid, p.m_C, p.hbar, t)
    ctrl = np.exp(-1j * np.outer(scenario.grid_B.points, grid.points) * (t / (p.m_C * p.hbar)))
    return ctrl * base[None, :]


def conditional_env_state(scenario: FrameScenario, pi_B: float, t: float, env: int = 1) -> WaveFunction:
    """C state correlated with B momentum ``pi_B`` (which must be a point of ``grid_B``)."""
    i = scenario.grid_B.index_of(pi_B)
    return env_state_for_momentum(scenario, scenario.grid_B.points[i], t, env)


def env_state_for_momentum(scenario: FrameScenario, pi_B: float, t: float, env: int = 1) -> WaveFunction:
    """Same as :func:`conditional_env_state` for any control momentum, on or off ``grid_B``."""
    p = scenario.params
    spec, grid = (scenario.phi0_A, scenario.grid_C) if env == 1 else (scenario.phi0_A2, scenario.grid_C2)
    if spec is None:
        raise ConfigurationError("scenario has no second environment")
    base = make_gaussian(grid, env_spec_in_frame_A(spec, p)).amps * free_phases(grid, p.m_C, p.hbar, t)
    return WaveFunction(grid, base * np.exp(-1j * pi_B * grid.points * (t / (p.m_C * p.hbar))))


# --- frame C and the factor-by-factor frame change -----------------------------------------


def grid_A_for(grid_C: MomentumGrid, params: PhysicalParams) -> MomentumGrid:
    """Grid for A in frame C that the velocity swap maps point-for-point onto ``grid_C``.

    A point ``i`` maps to C index ``(n - i) % n``; index 0 lands on the
    periodic image of ``p_max``, which the edge guard keeps empty.
    """
    r = params.m_A / params.m_C
    return MomentumGrid(-r * grid_C.p_max, -r * grid_C.p_min, grid_C.n)


def evolve_frame_C(scenario: FrameScenario, t: float) -> JointWaveFunction:
    """Frame-C state at time ``t``: free product, B on axis 0 and A on axis 1 (in the ``grid_C`` slot)."""
    p = scenario.params
    grid_A = grid_A_for(scenario.grid_C, p)
    wf_A = make_gaussian(grid_A, scenario.phi0_A)
    wf_B = make_state(scenario.grid_B, scenario.psi0_B)
    amps = np.outer(
        wf_B.amps * free_phases(scenario.grid_B, p.m_B, p.hbar, t),
        wf_A.amps * free_phases(grid_A, p.m_A, p.hbar, t),
    )
    return JointWaveFunction(scenario.grid_B, grid_A, amps)


def boost_generator(grid_B: MomentumGrid, params: PhysicalParams, t: float) -> np.ndarray:
    """Dense Hermitian matrix of ``G_B = p_B t - m_B x_B`` on the periodic grid."""
    n = grid_B.n
    x = params.hbar * grid_B.positions
    X = np.fft.ifft(x[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    X = 0.5 * (X + X.conj().T)
    return t * np.diag(grid_B.points).astype(complex) - params.m_B * X


def galilean_frame_change(state_C: JointWaveFunction, params: PhysicalParams, t: float, grid_C: MomentumGrid,
                          stages: bool = False):
    """Apply the frame-change unitary factor by factor to a frame-C state (B on axis 0, A on axis 1).

    Factors, right to left: ``exp(+i p_A**2 t / 2 m_A hbar)``, the boost
    ``exp((i/hbar)(p_A/m_A) G_B)`` (exponentiated through an eigendecomposition
    of ``G_B``, independent of the translation route used by
    :func:`galilean_coupling`), the velocity swap A -> C, and
    ``exp(-i pi_C**2 t / 2 m_C hbar)``.

    With ``stages=True`` returns ``[(name, JointWaveFunction), ...]`` after each factor.
    """
    if state_C.grid_C != grid_A_for(grid_C, params):
        raise GridMismatchError("frame-C state is not on the grid that maps onto grid_C")
    hbar = params.hbar
    grid_A = state_C.grid_C
    out = []
    a = state_C.amps * np.conj(free_phases(grid_A, params.m_A, hbar, t))[None, :]
    out.append(("undo A free evolution", JointWaveFunction(state_C.grid_B, grid_A, a)))

    lam, V = np.linalg.eigh(boost_generator(state_C.grid_B, params, t))
    c = grid_A.points / (params.m_A * hbar)
    a = V @ (np.exp(1j * np.outer(lam, c)) * (V.conj().T @ a))
    out.append(("boost", JointWaveFunction(state_C.grid_B, grid_A, a)))

    n = grid_C.n
    perm = (n - np.arange(n)) % n
    swapped = np.empty_like(a)
    swapped[:, perm] = a
    out.append(("velocity swap", JointWaveFunction(state_C.grid_B, grid_C, swapped)))

    a = swapped * free_phases(grid_C, params.m_C, hbar, t)[None, :]
    final = JointWaveFunction(state_C.grid_B, grid_C, a)
    out.append(("C free phase", final))
    return out if stages else final


def shear_then_evolve(scenario: FrameScenario, t: float) -> JointWaveFunction:
    """Closed composition equal to :func:`galilean_frame_change` of :func:`evolve_frame_C`.

    The boost generator at time t is the free-evolved ``-m_B x_B``, so the
    frame change reduces to the t=0 shear followed by free evolution.  The
    discrete frame change matches this only when the grid resolves B's drift.
    """
    p = scenario.params
    return evolve_free(galilean_coupling(parity_swap_velocity(scenario), p, 0.0), p, t)


def factorized_amplitudes(scenario: FrameScenario, t: float) -> np.ndarray:
    """Closed form of :func:`to_frame_A` amplitudes by analytic sampling (before renormalization).

    ``psi0(pi_B - (m_B/m_C) pi_C) phi(-pi_C)`` times the product of the free,
    controlled and scalar phases.
    """
    p = scenario.params
    pB = scenario.grid_B.points[:, None]
    pC = scenario.grid_C.points[None, :]
    s = p.m_B / p.m_C
    env = env_spec_in_frame_A(scenario.phi0_A, p)
    amp = scenario.psi0_B.amplitude(pB - s * pC) * env.amplitude(pC)
    # B's free phase is kept as its own factor: for light B it is a huge angle
    phase = (pC**2 / (2 * p.m_C) - s * pC**2 / (2 * p.m_C) + pB * pC / p.m_C) * t / p.hbar
    ph_B = free_phases(scenario.grid_B, p.m_B, p.hbar, t)[:, None]
    dp = math.sqrt(scenario.grid_B.dp * scenario.grid_C.dp)
    return amp * ph_B * np.exp(-1j * phase) * dp
