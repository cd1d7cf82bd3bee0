"""
Spectrum broadcast structure with two environments
==================================================

Two environment particles watch B.  Tracing one of them out, the other
ends up holding a copy of which momentum bin B is in, while the coherence
between bins dies.  Seen from C, nothing of the sort happens.
"""

# %%
import numpy as np

from qrfdeco import scenarios
from qrfdeco.decoherence import decoherence_time
from qrfdeco.frames import env_spec_in_frame_A
from qrfdeco.sbs import PointerBinning, build_bc1, build_bc1_frame_c, sbs_report

sc = scenarios.sbs_reference()
a, b = scenarios.SBS_PI
tau = decoherence_time(a, b, env_spec_in_frame_A(sc.phi0_A, sc.params).width, sc.params.m_C, sc.params.hbar)
binning = PointerBinning(sc.grid_B, scenarios.SBS_EDGES)

# %%
for t in np.linspace(0, 5 * tau, 6):
    r = sbs_report(*build_bc1(sc, t), binning)
    c = sbs_report(*build_bc1_frame_c(sc, t), binning)
    print(f"t/tau = {t / tau:3.1f}   frame A: coherence {r.coherence_ratio:.2e} overlap {r.max_overlap:.2e} "
          f"SBS {r.sbs_ok!s:5}   frame C: SBS {c.sbs_ok}")
