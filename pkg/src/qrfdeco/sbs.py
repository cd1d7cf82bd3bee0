"""Spectrum broadcast structure with two environment particles.

In frame A the system B couples to C1 and C2 through their joint momentum.
Tracing C2 leaves

    rho_BC1 = sum_ij K_ij |p_i><p_j| (x) |phi_i><phi_j|

with ``K_ij = Gamma_C2(p_i, p_j, t) psi(p_i) conj(psi(p_j))``.  Pointer
states are momentum bins of B; SBS is judged by the decay of inter-bin
kernel blocks and by how well C1's bin-averaged states tell the bins apart.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoherence import evolved_psi_B, generalized_overlap, numeric_kernel
from .errors import ConfigurationError, EmptyBinError, GridMismatchError
from .frames import (
    FrameScenario,
    _controlled_boost,
    conditional_env_states,
    env_spec_in_frame_A,
    free_phases,
    grid_A_for,
)
from .states import DensityMatrix, MomentumGrid, make_gaussian, make_state

MIN_BIN_MASS = 1e-12


@dataclass(frozen=True, eq=False)
class PointerBinning:
    """Partition of ``grid`` into bins ``[edges[k], edges[k+1])``."""

    grid: MomentumGrid
    bin_edges: tuple
    min_bins: int = 2

    def __post_init__(self):
        e = tuple(float(x) for x in self.bin_edges)
        object.__setattr__(self, "bin_edges", e)
        if self.min_bins < 2:
            raise ConfigurationError("min_bins must be at least 2", key="min_bins")
        if len(e) - 1 < self.min_bins:
            raise ConfigurationError(f"need at least {self.min_bins} bins, got {len(e) - 1}", key="bins")
        if any(b <= a for a, b in zip(e, e[1:])):
            raise ConfigurationError("bin edges must be strictly ascending", key="bins")
        g = self.grid
        if e[0] != g.p_min or e[-1] > g.p_max or e[-1] <= g.points[-1]:
            raise ConfigurationError("bin edges must start at p_min and end beyond the last grid point, "
                                     "within the grid bounds", key="bins")
        counts = np.bincount(self.assign(), minlength=self.n_bins)
        empty = [k for k, c in enumerate(counts) if c == 0]
        if empty:
            raise EmptyBinError(f"bins {empty} contain no grid points", bins=empty)

    @classmethod
    def uniform(cls, grid: MomentumGrid, n_bins: int, min_bins: int = 2) -> "PointerBinning":
        return cls(grid, tuple(np.linspace(grid.p_min, grid.p_max, n_bins + 1)), min_bins)

    @property
    def n_bins(self) -> int:
        return len(self.bin_edges) - 1

    def assign(self) -> np.ndarray:
        """Bin index of every grid point."""
        return np.searchsorted(np.asarray(self.bin_edges), self.grid.points, side="right") - 1


@dataclass(frozen=True, eq=False)
class SBSReport:
    bin_probs: np.ndarray
    coherence_ratio: float
    distinguishability: np.ndarray
    sbs_ok: bool

    def __post_init__(self):
        if abs(float(np.sum(self.bin_probs)) - 1.0) > 1e-9:
            raise ConfigurationError("bin probabilities do not sum to 1")

    @property
    def max_overlap(self) -> float:
        d = self.distinguishability
        off = d[~np.eye(d.shape[0], dtype=bool)]
        return float(off.max())


def build_bc1(scenario: FrameScenario, t: float):
    """Kernel and C1 conditional states of the frame-A ``rho_BC1``.

    Returns ``(kernel, conditional_states)``: a DensityMatrix on ``grid_B``
    (it is B's reduced state) and an array whose row ``i`` is C1's state
    for ``pi_B = p_i``.  The kernel carries B's free phase.
    """
    if not scenario.has_second_environment:
        raise ConfigurationError("build_bc1 needs a second environment (state.C2)")
    p = scenario.params
    psi = evolved_psi_B(make_state(scenario.grid_B, scenario.psi0_B), p, t)
    phi2 = make_gaussian(scenario.grid_C2, env_spec_in_frame_A(scenario.phi0_A2, p))
    x = scenario.grid_B.points
    K = numeric_kernel(phi2, p)(x[:, None], x[None, :], t) * np.outer(psi.amps, psi.amps.conj())
    return DensityMatrix(scenario.grid_B, K), conditional_env_states(scenario, t, env=1)


def build_bc1_frame_c(scenario: FrameScenario, t: float):
    """The frame-C control: B evolves freely and the environment state does not depend on B."""
    p = scenario.params
    psi = evolved_psi_B(make_state(scenario.grid_B, scenario.psi0_B), p, t)
    grid_A = grid_A_for(scenario.grid_C, p)
    a = make_gaussian(grid_A, scenario.phi0_A).amps * free_phases(grid_A, p.m_A, p.hbar, t)
    K = np.outer(psi.amps, psi.amps.conj())
    return DensityMatrix(scenario.grid_B, K), np.broadcast_to(a, (scenario.grid_B.n, grid_A.n))


def assemble_bc1(kernel: DensityMatrix, conditional_states: np.ndarray) -> np.ndarray:
    """Dense ``rho_BC1`` with composite index ``(i, a) -> i * n_C1 + a``; small grids only."""
    K, F = kernel.elems, np.asarray(conditional_states)
    nB, nC = F.shape
    rho = K[:, None, :, None] * F[:, :, None, None] * F.conj()[None, None, :, :]
    return rho.reshape(nB * nC, nB * nC)


def simulate_bc1c2(scenario: FrameScenario, t: float) -> np.ndarray:
    """Brute-force frame-A state of B, C1, C2 with C2 traced out, as a dense ``rho_BC1``.

    The coupling to the joint momentum is applied one environment factor at
    a time (the two boosts commute), followed by free evolution of all three.
    """
    if not scenario.has_second_environment:
        raise ConfigurationError("simulate_bc1c2 needs a second environment (state.C2)")
    p = scenario.params
    gB, g1, g2 = scenario.grid_B, scenario.grid_C, scenario.grid_C2
    b = make_state(gB, scenario.psi0_B).amps
    c1 = make_gaussian(g1, env_spec_in_frame_A(scenario.phi0_A, p)).amps
    c2 = make_gaussian(g2, env_spec_in_frame_A(scenario.phi0_A2, p)).amps
    amps = b[:, None, None] * c1[None, :, None] * c2[None, None, :]
    amps = _controlled_boost(amps, gB, g1.points[:, None], p, t)
    amps = _controlled_boost(amps, gB, g2.points[None, :], p, t)
    amps = (amps * free_phases(gB, p.m_B, p.hbar, t)[:, None, None]
            * free_phases(g1, p.m_C, p.hbar, t)[None, :, None]
            * free_phases(g2, p.m_C, p.hbar, t)[None, None, :])
    m = amps.reshape(gB.n * g1.n, g2.n)
    return m @ m.conj().T


def sbs_report(kernel: DensityMatrix, conditional_states, binning: PointerBinning,
               thresholds=(0.05, 0.05), reference: DensityMatrix | None = None) -> SBSReport:
    """Binned SBS diagnostics.

    ``coherence_ratio`` is the largest Frobenius norm of an inter-bin kernel
    block divided by the same norm at t = 0.  Without ``reference`` the t = 0
    value is taken as ``sqrt(p_a p_b)``, exact for a pure initial B state.
    Distinguishability is the generalized overlap of bin-averaged C1 states.
    """
    if binning.grid != kernel.grid:
        raise GridMismatchError("binning and kernel use different grids")
    coh_max, overlap_max = thresholds
    F = np.asarray(conditional_states)
    K = kernel.elems
    w = kernel.populations
    idx = binning.assign()
    nb = binning.n_bins
    members = [np.flatnonzero(idx == k) for k in range(nb)]
    probs = np.array([w[m].sum() for m in members])
    light = [k for k in range(nb) if probs[k] < MIN_BIN_MASS]
    if light:
        raise EmptyBinError(f"bins {light} carry no probability", bins=light)

    ratio = 0.0
    for a in range(nb):
        for b in range(a + 1, nb):
            block = np.linalg.norm(K[np.ix_(members[a], members[b])])
            if reference is None:
                ref = np.sqrt(probs[a] * probs[b])
            else:
                ref = np.linalg.norm(reference.elems[np.ix_(members[a], members[b])])
            ratio = max(ratio, float(block / ref))

    grid_env = MomentumGrid(0.0, 1.0, F.shape[1])  # overlap only needs a common grid label
    states = []
    for k, m in enumerate(members):
        Fk = F[m]
        rho = Fk.T @ (w[m, None] / probs[k] * Fk.conj())
        states.append(DensityMatrix(grid_env, rho))
    D = np.eye(nb)
    for a in range(nb):
        for b in range(a + 1, nb):
            D[a, b] = D[b, a] = generalized_overlap(states[a], states[b])
    ok = bool(ratio <= coh_max and (D[~np.eye(nb, dtype=bool)].max() <= overlap_max))
    return SBSReport(probs, ratio, D, ok)
