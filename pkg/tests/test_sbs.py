import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrfdeco import scenarios
from qrfdeco.decoherence import decoherence_time, gamma_numeric
from qrfdeco.errors import ConfigurationError, EmptyBinError, GridMismatchError
from qrfdeco.frames import FrameScenario, env_spec_in_frame_A
from qrfdeco.sbs import (
    PointerBinning,
    SBSReport,
    assemble_bc1,
    build_bc1,
    build_bc1_frame_c,
    sbs_report,
    simulate_bc1c2,
)
from qrfdeco.states import CatSpec, DensityMatrix, GaussianSpec, PhysicalParams, make_gaussian, make_grid

SC = scenarios.sbs_reference()
BINS = PointerBinning(SC.grid_B, scenarios.SBS_EDGES)
A, B = scenarios.SBS_PI
TAU = decoherence_time(A, B, env_spec_in_frame_A(SC.phi0_A, SC.params).width, SC.params.m_C, SC.params.hbar)


def test_binning_validation():
    g = SC.grid_B
    assert BINS.n_bins == 2
    idx = BINS.assign()
    assert np.all(idx[g.points < 0] == 0) and np.all(idx[g.points >= 0] == 1)
    assert PointerBinning.uniform(g, 4).n_bins == 4
    for edges in [(-5, 5), (-5, 1, 0, 5), (-4, 0, 5), (-5, 0, 6), (-5, 0, 4.9)]:
        with pytest.raises(ConfigurationError):
            PointerBinning(g, edges)
    with pytest.raises(ConfigurationError):
        PointerBinning(g, (-5, 0, 5), min_bins=1)
    with pytest.raises(EmptyBinError) as e:
        PointerBinning(g, (-5, 0.01, 0.02, 5))
    assert e.value.bins == (1,) or list(e.value.bins) == [1]


def test_bin_without_probability_is_rejected():
    g = make_grid(-10, 10, 200)
    sc = FrameScenario(SC.params, CatSpec(-2, 2, 0.25), SC.phi0_A, g, SC.grid_C, SC.phi0_A2, SC.grid_C2)
    with pytest.raises(EmptyBinError):
        sbs_report(*build_bc1(sc, 0.0), PointerBinning(g, (-10, -7, 0, 10)))


def test_report_validates_probabilities_and_grids():
    with pytest.raises(ConfigurationError):
        SBSReport(np.array([0.5, 0.4]), 0.0, np.eye(2), False)
    K, F = build_bc1(SC, 0.0)
    with pytest.raises(GridMismatchError):
        sbs_report(K, F, PointerBinning.uniform(make_grid(-5, 5, 100), 2))


def test_no_sbs_at_start():
    r = sbs_report(*build_bc1(SC, 0.0), BINS)
    assert np.allclose(r.bin_probs, [0.5, 0.5], atol=1e-12)
    assert abs(r.coherence_ratio - 1) < 1e-9
    assert np.allclose(r.distinguishability, 1, atol=1e-9)
    assert r.sbs_ok is False


def test_sbs_forms_in_frame_A():
    r = sbs_report(*build_bc1(SC, 5 * TAU), BINS)
    assert r.coherence_ratio <= 0.05 and r.max_overlap <= 0.05 and r.sbs_ok


def test_frame_C_control_never_shows_sbs():
    for t in np.linspace(0, 5 * TAU, 6):
        r = sbs_report(*build_bc1_frame_c(SC, t), BINS)
        assert not r.sbs_ok
        assert abs(r.coherence_ratio - 1) < 1e-9
        assert np.allclose(r.distinguishability, 1, atol=1e-9)


def test_populations_are_time_independent():
    p0 = sbs_report(*build_bc1(SC, 0.0), BINS).bin_probs
    for t in (TAU, 3 * TAU):
        assert np.allclose(sbs_report(*build_bc1(SC, t), BINS).bin_probs, p0, atol=1e-12)


def test_diagnostics_decrease():
    ts = np.linspace(0, 5 * TAU, 8)
    reps = [sbs_report(*build_bc1(SC, t), BINS) for t in ts]
    ratio = [r.coherence_ratio for r in reps]
    ov = [r.max_overlap for r in reps]
    assert np.all(np.diff(ratio) <= 1e-12) and np.all(np.diff(ov) <= 1e-12)


def test_explicit_reference_matches_default_for_pure_state():
    K0, _ = build_bc1(SC, 0.0)
    a = sbs_report(*build_bc1(SC, 2 * TAU), BINS)
    b = sbs_report(*build_bc1(SC, 2 * TAU), BINS, reference=K0)
    assert abs(a.coherence_ratio - b.coherence_ratio) < 1e-9


def _small(m_B=scenarios.LIGHT_B, env2=GaussianSpec(0.0, 1.0)):
    return FrameScenario(PhysicalParams(1.0, 1.0, m_B, 1.0), CatSpec(-1.5, 1.5, 0.4), GaussianSpec(0.3, 1.0),
                         make_grid(-5, 5, 30), make_grid(-7.7, 7.3, 48), env2, make_grid(-7, 7, 40))


@pytest.mark.parametrize("t", [0.0, 0.7, 2.0])
def test_tripartite_simulation_matches_assembly(t):
    sc = _small()
    rho = simulate_bc1c2(sc, t)
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.abs(rho - assemble_bc1(*build_bc1(sc, t))).max() < 1e-8


def test_identical_environments_share_gamma():
    sc = SC
    phi1 = make_gaussian(sc.grid_C, env_spec_in_frame_A(sc.phi0_A, sc.params))
    phi2 = make_gaussian(sc.grid_C2, env_spec_in_frame_A(sc.phi0_A2, sc.params))
    for t in (0.0, TAU, 2 * TAU):
        assert abs(gamma_numeric(phi1, A, B, sc.params, t) - gamma_numeric(phi2, A, B, sc.params, t)) < 1e-14


def test_requires_second_environment():
    sc = scenarios.gaussian_light_b()
    with pytest.raises(ConfigurationError):
        build_bc1(sc, 0.0)
    with pytest.raises(ConfigurationError):
        simulate_bc1c2(sc, 0.0)


@settings(max_examples=15)
@given(st.floats(0.0, 4.0), st.integers(2, 5))
def test_report_invariants(t, nbins):
    sc = scenarios.sbs_reference(n_B=60, n_C=96)
    r = sbs_report(*build_bc1(sc, t), PointerBinning.uniform(sc.grid_B, nbins))
    D = r.distinguishability
    assert abs(r.bin_probs.sum() - 1) < 1e-9
    assert np.allclose(D, D.T) and np.all(np.diag(D) == 1)
    assert np.all(D >= -1e-12) and np.all(D <= 1 + 1e-9)
    assert 0 <= r.coherence_ratio <= 1 + 1e-9
