import math

import numpy as np
import pytest
import sympy as sp

from qrfdeco import scenarios
from qrfdeco.catstate import (
    BRANCH_PAIRS,
    cat_gamma_closed,
    cat_gamma_numeric,
    cat_reduced_B,
    integrand_grid,
    tau_tilde,
)
from qrfdeco.decoherence import assemble_reduced_B, decoherence_time, evolved_psi_B, gaussian_kernel
from qrfdeco.errors import ConfigurationError, ParameterRegimeError
from qrfdeco.frames import FrameScenario, to_frame_A
from qrfdeco.runner import fit_gaussian_decay
from qrfdeco.states import CatSpec, GaussianSpec, PhysicalParams, make_gaussian, make_grid, purity, reduce

EQ = PhysicalParams(1.0, 1.0, 1.0, 1.0)
CAT = CatSpec(-1.5, 2.0, 0.7)
ENV = GaussianSpec(0.5, 1.0)


@pytest.mark.parametrize("branch", [(-1.5, -1.5), (-1.5, 2.0), (2.0, 2.0)])
@pytest.mark.parametrize("pis", [(0.3, -0.4), (1.0, 1.0), (2.0, -1.0)])
def test_closed_form_matches_quadrature(branch, pis):
    a, b = pis
    tt = tau_tilde(a, b, CAT, ENV, EQ) if a != b else 1.0
    for t in (0.0, 0.5 * tt, tt, 3 * tt):
        c = cat_gamma_closed(CAT, ENV, a, b, branch, EQ, t)
        n = cat_gamma_numeric(CAT, ENV, a, b, branch, EQ, t)
        assert abs(c.total - n) / abs(n) < 1e-10
        assert abs(c.total - c.gamma_pi * c.gamma_branch) <= 1e-14 * abs(c.total)


def test_closed_form_with_unequal_masses():
    p = PhysicalParams(1.0, 2.0, 0.5, 1.5)
    for t in (0.0, 1.0, 2.5):
        c = cat_gamma_closed(CAT, ENV, 0.4, -0.6, (-1.5, 2.0), p, t).total
        n = cat_gamma_numeric(CAT, ENV, 0.4, -0.6, (-1.5, 2.0), p, t)
        assert abs(c - n) / abs(n) < 1e-10


def test_vanishing_terms_give_real_positive_value():
    branch = (-1.5, 2.0)
    pi = sum(branch) / 2
    v = cat_gamma_numeric(CAT, ENV, pi, pi, branch, EQ, 2.0)
    assert abs(v.imag) < 1e-14 and 0 < v.real <= 1


def test_same_branch_self_overlap_is_norm_of_conditional_state():
    # <phi~|phi~> for pi_B = pi_B' = beta equals sum_C |branch(beta - s pi_C)|**2 |phi(pi_C)|**2
    g = integrand_grid(CAT, ENV, CAT.beta, CAT.beta, (CAT.beta, CAT.beta), EQ, n=8192)
    x = g.points
    direct = np.sum(CAT.branch(CAT.beta - x, CAT.beta) ** 2 * GaussianSpec(-0.5, 1.0).amplitude(x) ** 2) * g.dp
    c = cat_gamma_closed(CAT, ENV, CAT.beta, CAT.beta, (CAT.beta, CAT.beta), EQ, 0.0).total
    assert abs(c - direct) < 1e-12


def test_weighted_kernel_bounded_by_one():
    x = np.linspace(-6, 6, 41)
    for bb in [(CAT.beta, CAT.beta), (CAT.beta, CAT.beta_prime)]:
        G = cat_gamma_closed(CAT, ENV, x[:, None], x[None, :], bb, EQ, 0.8).total
        w = np.outer(CAT.branch(x, bb[0]), CAT.branch(x, bb[1]))
        assert np.max(np.abs(G * w)) <= 1 + 1e-9


def test_initial_entanglement_for_distinct_branches():
    branch = (CAT.beta, CAT.beta_prime)
    c = cat_gamma_closed(CAT, ENV, 0.3, -0.2, branch, EQ, 0.0)
    # normalized by the same-momentum values this is the overlap of two different C states
    d1 = cat_gamma_closed(CAT, ENV, 0.3, 0.3, (CAT.beta, CAT.beta), EQ, 0.0).total
    d2 = cat_gamma_closed(CAT, ENV, -0.2, -0.2, (CAT.beta_prime, CAT.beta_prime), EQ, 0.0).total
    assert abs(c.total) / math.sqrt(abs(d1 * d2)) < 1


def test_leading_gaussian_decay():
    a, b = 0.5, -0.5
    tt = tau_tilde(a, b, CAT, ENV, EQ)
    t = np.linspace(0.5 * tt, 3 * tt, 20)
    g = np.abs(cat_gamma_closed(CAT, ENV, a, b, (CAT.beta, CAT.beta_prime), EQ, t).total)
    g0 = abs(cat_gamma_closed(CAT, ENV, a, b, (CAT.beta, CAT.beta_prime), EQ, 0.0).total)
    assert np.allclose(np.log(g) - np.log(g0), -((t / tt) ** 2), rtol=1e-2)
    assert np.all(np.diff(g) < 0)


def test_fitted_tau_tilde_matches_formula():
    a, b = 0.5, -0.5
    tt = tau_tilde(a, b, CAT, ENV, EQ)
    t = np.linspace(0, 3 * tt, 30)
    n = [abs(cat_gamma_numeric(CAT, ENV, a, b, (CAT.beta, CAT.beta_prime), EQ, x)) for x in t]
    formula = 2 * math.sqrt(ENV.width**2 + CAT.width**2) / (abs(a - b) * ENV.width * CAT.width)
    assert abs(tt - formula) / formula < 1e-14
    assert abs(fit_gaussian_decay(t, n) - formula) / formula < 1e-2


def test_tau_tilde_wide_branch_limit_symbolic():
    hbar, m, dpi, dg, db = sp.symbols("hbar m dpi D_g D_b", positive=True)
    tt = 2 * hbar * m * sp.sqrt(dg**2 + db**2) / (dpi * dg * db)
    assert sp.simplify(sp.limit(tt, db, sp.oo) - 2 * hbar * m / (dpi * dg)) == 0
    # the ratio to the single-Gaussian timescale
    assert sp.simplify(tt / (2 * hbar * m / (dpi * dg)) - sp.sqrt(dg**2 + db**2) / db) == 0


def test_tau_tilde_numeric_limits():
    wide = CatSpec(-1, 1, 1e8)
    ref = decoherence_time(0.5, -0.5, ENV.width, 1.0, 1.0)
    assert abs(tau_tilde(0.5, -0.5, wide, ENV, EQ) - ref) / ref < 1e-9
    assert tau_tilde(0.5, 0.5, CAT, ENV, EQ) == math.inf


def test_printed_forms_agree_only_in_the_unit_case():
    # the quoted forms coincide with the integral at D_g = D_b = 1, gamma0 = 0 ...
    unit_cat, unit_env = CatSpec(0.0, 0.4, 1.0), GaussianSpec(0.0, 1.0)
    for t in (0.0, 1.0, 2.0):
        pr = cat_gamma_closed(unit_cat, unit_env, 0.3, -0.2, (0.0, 0.4), EQ, t, printed=True).total
        n = cat_gamma_numeric(unit_cat, unit_env, 0.3, -0.2, (0.0, 0.4), EQ, t)
        assert abs(pr - n) / abs(n) < 1e-12
    # ... and differ otherwise (prefactor, powers of D_b and the gamma0 sign)
    pr = cat_gamma_closed(CAT, ENV, 0.3, -0.2, (CAT.beta, CAT.beta_prime), EQ, 0.0, printed=True).total
    n = cat_gamma_numeric(CAT, ENV, 0.3, -0.2, (CAT.beta, CAT.beta_prime), EQ, 0.0)
    assert abs(pr - n) / abs(n) > 0.1
    with pytest.raises(ConfigurationError):
        cat_gamma_closed(CAT, ENV, 0.3, -0.2, (0, 0), PhysicalParams(1, 1, 2, 1), 0.0, printed=True)


def test_printed_tau_tilde_agrees_for_equal_masses():
    c = cat_gamma_closed(CAT, ENV, 0.3, -0.2, (CAT.beta, CAT.beta_prime), EQ, 0.0, printed=True)
    assert abs(c.tau_tilde - tau_tilde(0.3, -0.2, CAT, ENV, EQ)) < 1e-12


def test_parameter_regime_guard():
    with pytest.raises(ParameterRegimeError):
        cat_gamma_numeric(CAT, ENV, 400.0, 400.0, (-1.5, 2.0), EQ, 0.0, grid=make_grid(-5, 5, 256))
    with pytest.raises(ParameterRegimeError):
        cat_gamma_numeric(CAT, ENV, 0.3, -0.2, (-1.5, 2.0), EQ, 0.0, grid=make_grid(-1, 1, 256))


# --- reduced state ------------------------------------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.5, 1.5])
def test_cat_reduced_B_matches_pipeline(t):
    sc = FrameScenario(EQ, CAT, ENV, make_grid(-16, 16, 256), make_grid(-10, 10, 256))
    rho = cat_reduced_B(sc, t)
    assert np.abs(reduce(to_frame_A(sc, t), "B").elems - rho.elems).max() < 1e-6
    raw = cat_reduced_B(sc, t, normalize=False)
    assert abs(np.trace(raw) - 1) < 1e-10


def test_cat_reduced_B_initially_mixed():
    assert purity(cat_reduced_B(scenarios.reference_cat(), 0.0)) < 1


def test_collapsed_cat_reduces_to_gaussian_assembly():
    p = PhysicalParams(1.0, 1.0, 1e-8, 1.0)
    gB, gC = make_grid(-10, 10, 128), make_grid(-10.5, 9.5, 128)
    sc = FrameScenario(p, CatSpec(0.0, 0.0, 1.0), ENV, gB, gC)
    t = 1.2
    psi = evolved_psi_B(make_gaussian(gB, GaussianSpec(0.0, 1.0)), p, t)
    ref = assemble_reduced_B(psi, gaussian_kernel(ENV, p), t)
    assert np.abs(cat_reduced_B(sc, t).elems - ref.elems).max() < 1e-7


def test_interbranch_coherence_suppressed_late():
    sc = FrameScenario(EQ, CatSpec(-3.0, 3.0, 0.7), ENV, make_grid(-24, 24, 256), make_grid(-10.5, 9.5, 128))
    x = sc.grid_B.points
    left, right = x < 0, x >= 0
    tt = tau_tilde(3.0, -3.0, sc.psi0_B, ENV, EQ)

    def block(t):
        return np.linalg.norm(cat_reduced_B(sc, t).elems[np.ix_(left, right)])

    assert block(5 * tt) < 0.01 * block(0.0)


def test_branch_pairs_enumerated():
    assert set(BRANCH_PAIRS) == {(0, 0), (0, 1), (1, 0), (1, 1)}
