"""
A momentum cat as the system
============================

With B in a superposition of two momentum branches and m_B = m_C, the
environment states also depend on the branch.  The decoherence factor
then factorizes into a branch-independent part and a branch part, and its
leading decay time grows with the branch width.
"""

# %%
import numpy as np

from qrfdeco import scenarios
from qrfdeco.catstate import cat_gamma_closed, cat_gamma_numeric, cat_reduced_B, tau_tilde
from qrfdeco.decoherence import decoherence_time
from qrfdeco.states import purity

sc = scenarios.reference_cat()
cat, env, p = sc.psi0_B, sc.phi0_A, sc.params
a, b = scenarios.CAT_PI
tt = tau_tilde(a, b, cat, env, p)
print(f"tau~ = {tt:.6f}   Gaussian tau = {decoherence_time(a, b, env.width, p.m_C, p.hbar):.6f}")

# %%
branch = cat.branches
for t in np.linspace(0, 2 * tt, 5):
    c = cat_gamma_closed(cat, env, a, b, branch, p, t)
    n = cat_gamma_numeric(cat, env, a, b, branch, p, t)
    print(f"t/tau~ = {t / tt:3.1f}   closed {abs(c.total):.6e}   quadrature {abs(n):.6e}")

# %%
# the controlled boost already entangles B and C at t = 0
print(f"purity of B at t = 0: {purity(cat_reduced_B(sc, 0.0)):.4f}")
print(f"purity of B at t = 3 tau~: {purity(cat_reduced_B(sc, 3 * tt)):.4f}")
