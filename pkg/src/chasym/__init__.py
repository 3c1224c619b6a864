"""Camassa-Holm long-time asymptotics: solver and verification toolkit."""

from .initial_data import ScatteringProfile, make_profile, u_initial, w_initial, y_of_x
from .spatial_schemes import (GridField, SchemeCoefficients, WavenumberPoint,
                              ccd_derivatives, ccd_gradient_centered,
                              dispersion_error_functional, helmholtz_solve,
                              modified_wavenumber)
from .time_integration import StepControl, SymplecticTableau, rk_step
from .ch_solver import SimulationConfig, Snapshot, conserved_quantities, rhs_eval, run
from .painleve import PiiFamily, PiiSolution, connection_params, solve_bvp
from .asymptotics import (RegionPartition, classify, eval_region2, eval_region3,
                          eval_soliton, eval_transition1, eval_transition2)

__version__ = "0.1.0"
