"""
Decoherence factor of a Gaussian environment
============================================

B is light, so in frame A the environment C only reads B's momentum.  Two
B momenta pi and pi' then drag C into states whose overlap is Gamma(t),
and |Gamma| falls off as a Gaussian with the timescale tau.
"""

# %%
import numpy as np

from qrfdeco import scenarios
from qrfdeco.decoherence import decoherence_time, gamma_gaussian, gamma_numeric
from qrfdeco.frames import env_spec_in_frame_A
from qrfdeco.states import make_gaussian

sc = scenarios.gaussian_light_b()
p = sc.params
a, b = scenarios.GAUSSIAN_PI
env = env_spec_in_frame_A(sc.phi0_A, p)
tau = decoherence_time(a, b, env.width, p.m_C, p.hbar)
print(f"environment in frame A: center {env.center}, width {env.width};  tau = {tau}")

# %%
# closed form against a plain Riemann sum on the environment grid
t = np.linspace(0, 3 * tau, 7)
closed = gamma_gaussian(sc.phi0_A, a, b, p, t)
numeric = gamma_numeric(make_gaussian(sc.grid_C, env), a, b, p, t)
for ti, g, n in zip(t, closed, numeric):
    print(f"t/tau = {ti / tau:4.1f}   |Gamma| = {abs(g):.6f}   quadrature {abs(n):.6f}   exp(-(t/tau)^2) = {np.exp(-(ti / tau) ** 2):.6f}")

# %%
# the same curve in SI units, written to disk the way `qrf fig2` does it
from qrfdeco.config import parse_config
from qrfdeco.runner import run_scenario

s = parse_config(scenarios.FIG2_CONFIG)
print(f"SI scenario: tau = {s.tau:.6e} s")
for path in run_scenario(s, "demo_out/fig2"):
    print("wrote", path)
