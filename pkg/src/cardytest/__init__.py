"""Numerical test of Cardy's loop-measure formula via slit-domain conformal radii."""

from .closedforms import rho0_equal, rho0_single, rho0_sym3, rho0_two
from .errors import DegenerateInputError, DomainError, PoleError, ResourceError, SolverError
from .iesum import CARDY_LIMIT, canonicalize, partial_sum_compositions, partial_sum_subsets, series_table
from .qseries import asymptotic_F0, cardy_F0, check_cardy_bounds, nome
from .slitmap import GapVector, SlitConfiguration, SlitMapSolution, solve_prevertices

__version__ = "0.1.0"
