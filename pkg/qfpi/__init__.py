"""
This module computes the steady-state transport of coherent light through two
saturable two-level emitters coupled to a one-dimensional waveguide.

Each emitter behaves as a mirror whose reflectance decreases with the power
reaching it. Together they form a Fabry-Perot interferometer whose mirrors
depend on the intracavity field: the powers impinging on the emitters are
obtained self-consistently, and the transmittance follows from the
Fabry-Perot formula. With different emitters, transmission depends on the
direction of propagation, so that the device rectifies light.

Quick example:

>>> dev = qfpi.DeviceConfig.from_values(length=0.5)
>>> T, sol = qfpi.transmit(0.1, dev)
>>> round(T, 3)
0.943
>>> res = qfpi.rectify(0.001, qfpi.DeviceConfig.from_values(length=0.986, dw1=0.09))
>>> res.r_factor > 0.5
True
"""

from qfpi.errors import (
    DesignSearchError,
    InvalidParameterError,
    QFPIError,
    SingularCavityError,
)
from qfpi.emitter import (
    EmitterParams,
    bloch_steady_state,
    phase_shift,
    reflectance,
)
from qfpi.cavity import CavityGeometry, MirrorPair, transmittance_formula
from qfpi.solver import (
    DeviceConfig,
    SolverSettings,
    SteadyStateSolution,
    scan_fixed_points,
    solve,
    solve_steady_state,
    solve_with_continuation,
)
from qfpi.transport import (
    Direction,
    average_intracavity_scaling,
    intracavity_profile,
    rectify,
    transmit,
)
from qfpi.sweep import SweepAxis, SweepSpec, design_search, run_sweep
