"""Radial extremal profiles for minimal resistance in a medium with density exp(-z)."""

from .errors import ExpNewtonError, NumericalFailure, ValidationError
from .model import M0, M1, flux_inverse, momentum_flux, ode_rhs, pressure_gain, series_eval
from .phase import OrbitClass, OrbitConfig, PhaseState, classify_orbit, find_equilibria, integrate_orbit
from .picard import PicardConfig, choose_radius, picard_solve
from .radial import RadialProfile, SolveConfig, solve_from_axis, solve_from_offset
from .resistance import ResistanceDomain, resistance_cone, resistance_radial

__version__ = "0.1.0"
