"""Gauge-aware numerics for a dipole coupled to a cavity-array waveguide."""

from .circuit import CircuitSpec, circuit_to_model, model_to_circuit
from .errors import BandEdgeError, ConfigError, ConvergenceError, DimensionError, GridTooSmallError
from .matter import DipoleSpec, renormalized_gap, solve_dipole
from .models import WaveguideSpec, build_full_coulomb, build_full_dipole, build_spin_boson
from .sweeps import SweepPlan, resonance_trace, run_sweep

__version__ = "0.1.0"
