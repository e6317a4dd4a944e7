"""Discrete spectrum of a double waveguide coupled through a delta barrier.

The package computes transverse modes of the cross-section operator,
assembles the associated Birman-Schwinger kernels, locates bound states,
evaluates weak-coupling expansions, counting bounds, and validates
everything against brute-force finite-difference solvers.
"""
__version__ = "0.1.0"

from .transverse import Geometry, ModeBasis, TransverseMode, solve_modes
from .profiles import (CouplingProfile, piecewise_profile, profile_from_callable,
                       rectangular_well)
from .bskernel import (DiscretizedOperator, Grid, assemble, grid_for_profile,
                       hs_norm, kernel_full, make_grid)
from .spectrum import (CountResult, SpectralPoint, SpectralReport, bs_eigencurves,
                       count_below, find_bound_states, schatten_norm,
                       solve_implicit_ground_state)
from .asymptotics import (ExpansionCoefficients, dirichlet_limit_sweep,
                          existence_criterion, scaled_expansion,
                          weak_coupling_expansion)
from .bounds import (CountBounds, bracketing_bound, skn_bound_general,
                     skn_bound_rectwell)
from .oracle import (FDConfig, StripResult, strip_fd, transverse_fd,
                     transverse_fd_extrapolated)

__all__ = [
    "__version__",
    "Geometry", "ModeBasis", "TransverseMode", "solve_modes",
    "CouplingProfile", "rectangular_well", "piecewise_profile", "profile_from_callable",
    "Grid", "DiscretizedOperator", "assemble", "make_grid", "grid_for_profile",
    "kernel_full", "hs_norm",
    "SpectralPoint", "SpectralReport", "CountResult", "bs_eigencurves",
    "find_bound_states", "solve_implicit_ground_state", "count_below", "schatten_norm",
    "ExpansionCoefficients", "weak_coupling_expansion", "scaled_expansion",
    "existence_criterion", "dirichlet_limit_sweep",
    "CountBounds", "skn_bound_general", "skn_bound_rectwell", "bracketing_bound",
    "FDConfig", "StripResult", "transverse_fd", "transverse_fd_extrapolated", "strip_fd",
]
