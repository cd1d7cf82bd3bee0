"""Relational decoherence of free particles under a quantum Galilean change of reference frame."""
from .errors import (
    ConfigurationError,
    EdgeGuardError,
    EmptyBinError,
    GridMismatchError,
    InvariantError,
    NoDecoherenceError,
    ParameterRegimeError,
    QRFError,
)
from .states import (
    CatSpec,
    DensityMatrix,
    GaussianSpec,
    JointWaveFunction,
    MomentumGrid,
    PhysicalParams,
    UnitSystem,
    WaveFunction,
    make_cat,
    make_gaussian,
    make_grid,
    purity,
    reduce,
)
from .frames import FrameScenario, galilean_coupling, galilean_frame_change, parity_swap_velocity, to_frame_A
from .decoherence import decoherence_time, gamma_gaussian, gamma_numeric, generalized_overlap
from .catstate import cat_gamma_closed, cat_gamma_numeric, cat_reduced_B, tau_tilde
from .sbs import PointerBinning, SBSReport, build_bc1, sbs_report

__version__ = "0.1.0"
