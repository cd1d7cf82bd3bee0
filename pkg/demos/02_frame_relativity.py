"""
Whether B decoheres depends on the frame
========================================

In frame C the two particles never interact, so B stays pure.  After the
change to A's frame, the Galilean coupling ties B's momentum to C's
position and B's reduced state loses purity.
"""

# %%
import numpy as np

from qrfdeco import scenarios
from qrfdeco.frames import evolve_frame_C, galilean_frame_change, shear_then_evolve, to_frame_A
from qrfdeco.states import entanglement_entropy, purity, reduce

sc = scenarios.gaussian_light_b()
tau = 2.0
for t in np.linspace(0, 3 * tau, 7):
    in_C = purity(reduce(evolve_frame_C(sc, t), "B"))
    joint_A = to_frame_A(sc, t)
    print(f"t/tau = {t / tau:3.1f}   purity in C {in_C:.6f}   purity in A {purity(reduce(joint_A, 'B')):.6f}   "
          f"entropy {entanglement_entropy(joint_A):.4f}")

# %%
# Two routes to frame A.  Propagating in C and then changing frame coincides
# with shearing at t = 0 and evolving freely; for equal masses that is not the
# state obtained from the swap followed by the coupling.
eq = scenarios.equal_mass()
for t in (0.5, 1.0):
    routed = galilean_frame_change(evolve_frame_C(eq, t), eq.params, t, eq.grid_C)
    direct = to_frame_A(eq, t)
    print(f"equal masses, t = {t}: |frame change - shear_then_evolve| = "
          f"{np.abs(routed.amps - shear_then_evolve(eq, t).amps).max():.1e}, "
          f"|frame change - to_frame_A| = {np.abs(routed.amps - direct.amps).max():.1e}")
