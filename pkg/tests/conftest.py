import numpy as np
import pytest

from deltaguide.profiles import rectangular_well
from deltaguide.transverse import Geometry, solve_modes


@pytest.fixture(scope="session")
def sym_geometry():
    return Geometry(1.0, 1.0)


@pytest.fixture(scope="session")
def basis_sym0(sym_geometry):
    """d1 = d2 = 1, alpha0 = 0: nu_n = (pi n / 2)^2, chi_n(0)^2 = 1,0,1,0,..."""
    return solve_modes(sym_geometry, 0.0, 200)


@pytest.fixture(scope="session")
def basis_sym0_small(sym_geometry):
    return solve_modes(sym_geometry, 0.0, 60)


@pytest.fixture(scope="session")
def well_unit():
    """Rectangular well of depth 1 and half-width 1 around alpha0 = 0."""
    return rectangular_well(0.0, -1.0, 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260825)
