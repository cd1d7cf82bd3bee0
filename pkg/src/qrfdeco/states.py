"""Momentum-space states on uniform grids.

Amplitudes use discrete normalization: ``amps[i] ~ psi(p_i) * sqrt(dp)``, so
norms, traces and overlaps are plain sums and never carry a ``dp`` factor.
A continuum wavefunction is recovered as ``amps / sqrt(dp)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, EdgeGuardError, GridMismatchError, InvariantError

NORM_TOL = 1e-12
EDGE_TOL = 1e-8
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-9


class UnitSystem(str, Enum):
    NATURAL = "natural"
    SI = "si"


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform grid ``p_i = p_min + i*dp`` for ``i in range(n)``, ``dp = (p_max - p_min)/n``.

    The grid is periodic: ``p_max`` itself is not a sample point.
    """

    p_min: float
    p_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError(f"grid needs n >= 2 points, got {self.n!r}")
        if not (math.isfinite(self.p_min) and math.isfinite(self.p_max)):
            raise ConfigurationError("grid bounds must be finite")
        if not self.p_min < self.p_max:
            raise ConfigurationError(
                f"grid bounds inverted or empty: p_min={self.p_min!r}, p_max={self.p_max!r}"
            )
        object.__setattr__(self, "p_min", float(self.p_min))
        object.__setattr__(self, "p_max", float(self.p_max))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.n

    @property
    def points(self) -> np.ndarray:
        return self.p_min + np.arange(self.n) * self.dp

    @property
    def positions(self) -> np.ndarray:
        """Conjugate position of each FFT bin (numpy ``fft`` ordering), in units of hbar=1.

        Multiply by ``hbar`` for dimensionful positions.  The sign makes
        ``ifft(exp(1j*a*x)*fft(f))`` the translation ``f(p) -> f(p - a)``.
        """
        return -2.0 * np.pi * np.fft.fftfreq(self.n) / self.dp

    def index_of(self, p: float, rtol: float = 1e-9) -> int:
        """Index of grid point ``p``; raises if ``p`` is not on the grid."""
        i = int(round((p - self.p_min) / self.dp))
        if not 0 <= i < self.n or abs(self.p_min + i * self.dp - p) > rtol * self.dp:
            raise ConfigurationError(f"momentum {p!r} is not a point of {self}")
        return i

    def refined(self, factor: int) -> "MomentumGrid":
        return MomentumGrid(self.p_min, self.p_max, self.n * int(factor))


def make_grid(p_min: float, p_max: float, n: int) -> MomentumGrid:
    return MomentumGrid(p_min, p_max, n)


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian amplitude ``exp(-(p - center)**2 / (2 width**2))``.

    ``|psi|**2`` then has variance ``width**2 / 2``.
    """

    center: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigurationError(f"Gaussian width must be positive, got {self.width!r}")

    def amplitude(self, p):
        """Continuum amplitude normalized with the ``(width**2 pi)**-1/4`` prefactor."""
        p = np.asarray(p, dtype=float)
        return (self.width**2 * np.pi) ** -0.25 * np.exp(-((p - self.center) ** 2) / (2 * self.width**2))


@dataclass(frozen=True)
class CatSpec:
    """Two-branch momentum cat ``N**-1/2 (g_beta + g_beta')`` with Gaussian branches of common width."""

    beta: float
    beta_prime: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigurationError(f"cat width must be positive, got {self.width!r}")

    @property
    def norm(self) -> float:
        """N such that the branch sum, each branch carrying ``(width**2 pi)**-1/4``, has norm N."""
        d = self.beta - self.beta_prime
        return 2.0 * (1.0 + math.exp(-(d * d) / (4 * self.width**2)))

    @property
    def branches(self) -> tuple:
        return (self.beta, self.beta_prime)

    def branch(self, p, beta):
        """Unnormalized branch ``exp(-(p - beta)**2 / (2 width**2))``."""
        p = np.asarray(p, dtype=float)
        return np.exp(-((p - beta) ** 2) / (2 * self.width**2))

    def amplitude(self, p):
        pref = (self.width**2 * np.pi) ** -0.25 / math.sqrt(self.norm)
        return pref * (self.branch(p, self.beta) + self.branch(p, self.beta_prime))


@dataclass(frozen=True)
class PhysicalParams:
    hbar: float = 1.0
    m_A: float = 1.0
    m_B: float = 1.0
    m_C: float = 1.0
    unit_system: UnitSystem = UnitSystem.NATURAL

    def __post_init__(self):
        for name in ("hbar", "m_A", "m_B", "m_C"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"{name} must be a positive finite number, got {v!r}", key=name)
        object.__setattr__(self, "unit_system", UnitSystem(self.unit_system))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def edge_band(n: int) -> int:
    """Number of points on each side outside the inner 90% of an n-point grid."""
    return int(math.floor(0.05 * n))


def check_edge_guard(amps: np.ndarray, axis: int = 0, what: str = "state") -> None:
    """Raise EdgeGuardError if any amplitude in the outer band along ``axis`` reaches EDGE_TOL."""
    amps = np.asarray(amps)
    k = edge_band(amps.shape[axis])
    if k == 0:
        return
    a = np.moveaxis(np.abs(amps), axis, 0)
    worst = max(a[:k].max(), a[-k:].max())
    if worst >= EDGE_TOL:
        raise EdgeGuardError(
            f"{what}: amplitude {worst:.3e} in the outer 10% of the grid (limit {EDGE_TOL:g}); widen the grid"
        )


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: MomentumGrid
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.shape != (self.grid.n,):
            raise GridMismatchError(f"amplitude shape {amps.shape} does not match grid size {self.grid.n}")
        nrm = float(np.vdot(amps, amps).real)
        if abs(nrm - 1.0) > NORM_TOL:
            raise InvariantError(f"wavefunction norm {nrm!r} differs from 1 by more than {NORM_TOL:g}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, grid: MomentumGrid, amps) -> "WaveFunction":
        amps = np.asarray(amps, dtype=complex)
        return cls(grid, amps / np.linalg.norm(amps))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def mean_momentum(self) -> float:
        return float(self.probabilities @ self.grid.points)

    def variance(self, about: float | None = None) -> float:
        c = self.mean_momentum() if about is None else about
        return float(self.probabilities @ (self.grid.points - c) ** 2)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.grid, np.outer(self.amps, self.amps.conj()))

    def overlap(self, other: "WaveFunction") -> complex:
        """``<self|other>``."""
        if other.grid != self.grid:
            raise GridMismatchError("overlap of wavefunctions on different grids")
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True, eq=False)
class JointWaveFunction:
    """Pure state of B and a partner particle, ``amps[i, j]`` with B on axis 0.

    In frame A the partner is C; the frame-C description of the same pair
    stores A on axis 1 under ``grid_C``.
    """

    grid_B: MomentumGrid
    grid_C: MomentumGrid
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.shape != (self.grid_B.n, self.grid_C.n):
            raise GridMismatchError(
                f"amplitude shape {amps.shape} does not match grids ({self.grid_B.n}, {self.grid_C.n})"
            )
        nrm = float(np.vdot(amps, amps).real)
        if abs(nrm - 1.0) > NORM_TOL:
            raise InvariantError(f"joint state norm {nrm!r} differs from 1 by more than {NORM_TOL:g}")
        object.__setattr__(self, "amps", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def check_edge_guard(self, what="joint state") -> None:
        check_edge_guard(self.amps, axis=0, what=f"{what} (B axis)")
        check_edge_guard(self.amps, axis=1, what=f"{what} (C axis)")

    def marginal(self, which: str) -> np.ndarray:
        """Momentum probabilities of one factor."""
        axis = 1 if which == "B" else 0
        return (np.abs(self.amps) ** 2).sum(axis=axis)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    grid: MomentumGrid
    elems: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.elems)
        n = self.grid.n
        if rho.shape != (n, n):
            raise GridMismatchError(f"density matrix shape {rho.shape} does not match grid size {n}")
        herm = np.abs(rho - rho.conj().T).max()
        if herm > HERMITIAN_TOL:
            raise InvariantError(f"density matrix not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantError(f"density matrix trace {tr!r} differs from 1")
        object.__setattr__(self, "elems", rho)

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of the symmetrized matrix."""
        return np.linalg.eigvalsh(0.5 * (self.elems + self.elems.conj().T))

    def check_positive(self) -> "DensityMatrix":
        lam = self.eigenvalues()[0]
        if lam < -POSITIVITY_TOL:
            raise InvariantError(f"density matrix has negative eigenvalue {lam:.3e}")
        return self

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.elems))


def _sample(grid: MomentumGrid, spec) -> WaveFunction:
    amps = spec.amplitude(grid.points) * math.sqrt(grid.dp)
    if not np.any(amps):
        raise EdgeGuardError(f"{spec} has no support on {grid}")
    wf = WaveFunction.normalized(grid, amps)
    check_edge_guard(wf.amps, what=type(spec).__name__)
    return wf


def make_gaussian(grid: MomentumGrid, spec: GaussianSpec) -> WaveFunction:
    """Sample a Gaussian and renormalize; discretization error goes into the edge guard, not the norm."""
    return _sample(grid, spec)


def make_cat(grid: MomentumGrid, spec: CatSpec) -> WaveFunction:
    return _sample(grid, spec)


def make_state(grid: MomentumGrid, spec) -> WaveFunction:
    if isinstance(spec, CatSpec):
        return make_cat(grid, spec)
    if isinstance(spec, GaussianSpec):
        return make_gaussian(grid, spec)
    raise TypeError(f"unsupported state spec {spec!r}")


def product(wf_B: WaveFunction, wf_C: WaveFunction) -> JointWaveFunction:
    return JointWaveFunction(wf_B.grid, wf_C.grid, np.outer(wf_B.amps, wf_C.amps))


def reduce(joint: JointWaveFunction, which: str) -> DensityMatrix:
    """Partial trace over the complementary factor.

    ``which="B"`` keeps axis 0, ``which="C"`` keeps axis 1.  The result is
    ``A A^dagger`` (or its transpose analogue), positive semidefinite by
    construction, so only hermiticity and trace are re-checked.
    """
    a = joint.amps
    if which == "B":
        return DensityMatrix(joint.grid_B, a @ a.conj().T)
    if which == "C":
        return DensityMatrix(joint.grid_C, a.T @ a.conj())
    raise ValueError(f"which must be 'B' or 'C', got {which!r}")


def purity(rho: DensityMatrix) -> float:
    """``Tr rho**2`` as the squared Frobenius norm of a Hermitian matrix."""
    return float(np.sum(np.abs(rho.elems) ** 2))


def schmidt_coefficients(joint: JointWaveFunction) -> np.ndarray:
    return np.linalg.svd(joint.amps, compute_uv=False)


def entanglement_entropy(joint: JointWaveFunction) -> float:
    """Von Neumann entropy (nats) of either reduced state."""
    w = schmidt_coefficients(joint) ** 2
    w = w[w > 1e-300]
    return float(-(w * np.log(w)).sum())
