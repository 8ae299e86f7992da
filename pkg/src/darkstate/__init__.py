"""Dissipative dynamics and stationary entanglement of two atoms in a lossy cavity."""

from .analytic import AnalyticSolution, asymptotic_state, back_transform, solve_constants, to_transformed
from .entangle import conditional_concurrence, conditional_state, fidelity, wootters_concurrence
from .lindblad import (
    Superoperator,
    Trajectory,
    assemble_liouvillian,
    evolve_expm,
    evolve_rk,
    spectral_gap,
    steady_states,
)
from .model import (
    Geometry,
    SystemParams,
    build_dissipators,
    build_hac,
    collective_unitary,
    dipole_f,
    eta_from_geometry,
    initial_state,
)
from .qops import DensityMatrix, HilbertLayout, Operator, cavity_layout

__version__ = "0.1.0"
