"""Reference scenarios used by the acceptance suite, the demos and ``qrf fig2``."""
from __future__ import annotations

from .frames import FrameScenario
from .states import CatSpec, GaussianSpec, PhysicalParams, make_grid

# Light B: the controlled translation of B by (m_B/m_C) pi_C is negligible,
# so C records B's momentum without disturbing it.
LIGHT_B = 1e-8


def gaussian_light_b(n_C: int = 256, n_B: int = 256) -> FrameScenario:
    """Gaussian B and environment, m_A = m_C = hbar = 1, light B.

    The environment has gamma0 = 2 and width 1, so in frame A it sits at -2;
    ``grid_C`` spans eight widths either side of it.
    """
    return FrameScenario(
        PhysicalParams(1.0, 1.0, LIGHT_B, 1.0),
        GaussianSpec(0.0, 1.0),
        GaussianSpec(2.0, 1.0),
        make_grid(-8.0, 8.0, n_B),
        make_grid(-10.0, 6.0, n_C),
    )


# control momenta for the Gaussian scenario; both are points of grid_B
GAUSSIAN_PI = (0.5, -0.5)


def equal_mass(n_C: int = 256, n_B: int = 256) -> FrameScenario:
    """Like :func:`gaussian_light_b` but with m_B = m_C, where the shear entangles B and C visibly."""
    sc = gaussian_light_b(n_C, n_B)
    return FrameScenario(PhysicalParams(1.0, 1.0, 1.0, 1.0), sc.psi0_B, sc.phi0_A,
                         make_grid(-12.0, 12.0, n_B), sc.grid_C)


def reference_cat(n_C: int = 256, n_B: int = 256) -> FrameScenario:
    """Equal masses, cat with branches at -1 and 1 (width 1), environment gamma0 = 0.5, width 1."""
    return FrameScenario(
        PhysicalParams(1.0, 1.0, 1.0, 1.0),
        CatSpec(-1.0, 1.0, 1.0),
        GaussianSpec(0.5, 1.0),
        make_grid(-18.0, 18.0, n_B),
        make_grid(-10.5, 9.5, n_C),
    )


CAT_PI = (0.5, -0.5)


def sbs_reference(n_B: int = 200, n_C: int = 256) -> FrameScenario:
    """Light B in a two-branch cat at -2 and 2, two identical environments (gamma0 = 0, width 1)."""
    env = GaussianSpec(0.0, 1.0)
    return FrameScenario(
        PhysicalParams(1.0, 1.0, LIGHT_B, 1.0),
        CatSpec(-2.0, 2.0, 0.25),
        env,
        make_grid(-5.0, 5.0, n_B),
        make_grid(-8.0, 8.0, n_C),
        env,
        make_grid(-8.0, 8.0, n_C),
    )


SBS_PI = (2.0, -2.0)
SBS_EDGES = (-5.0, 0.0, 5.0)


# SI reference curve: (pi_B - pi_B')/width = 2e-6 with m_C = 1e-17 kg.  The width
# itself is a free choice; 1e-25 kg m/s puts tau near 1.05e5 s.
FIG2_CONFIG = """\
[params]
units = si
m_A = 1e-17
m_B = 1e-25
m_C = 1e-17

[state.B]
kind = gaussian
center = 0.0
width = 1e-25

[state.C]
kind = gaussian
center = 0.0
width = 1e-25

[grid.B]
p_min = -1e-24
p_max = 1e-24
n = 256

[grid.C]
p_min = -8e-25
p_max = 8e-25
n = 1024

[times]
linspace = 0.0, 3.0, 121
units = tau

[experiment]
kind = gamma_curve
pi_B = 1e-31
pi_B_prime = -1e-31

[output]
name = fig2
dir = fig2_out
plot = true
"""
