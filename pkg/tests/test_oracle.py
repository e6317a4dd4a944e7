import math

import numpy as np
import pytest

from deltaguide.oracle import (FDConfig, strip_fd, transverse_fd,
                               transverse_fd_extrapolated)
from deltaguide.profiles import rectangular_well
from deltaguide.transverse import Geometry, solve_modes


def test_fd_config_validation():
    with pytest.raises(ValueError):
        FDConfig(hx=0.0, hy=0.1, X=5.0)
    with pytest.raises(ValueError):
        transverse_fd(Geometry(1.0, 1.0), 0.0, 0.3, 4)  # 0.3 does not divide 1


def test_transverse_fd_decoupled_exact_rate():
    # alpha0 = 0: exact eigenvalues (pi n / 2)^2; error falls at order 2
    g = Geometry(1.0, 1.0)
    exact = (math.pi / 2.0) ** 2
    errs = [abs(transverse_fd(g, 0.0, hy, 1)[0] - exact)
            for hy in (1e-2, 5e-3, 2.5e-3)]
    slope = np.polyfit(np.log([1e-2, 5e-3, 2.5e-3]), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.2)


@pytest.mark.parametrize("d1,d2,alpha0", [(1.0, 1.0, 5.0), (1.0, 2.0, 3.0),
                                          (1.0, 1.0, -0.5)])
def test_transverse_fd_extrapolated_matches_secular_roots(d1, d2, alpha0):
    g = Geometry(d1, d2)
    basis = solve_modes(g, alpha0, 8)
    hy = min(d1, d2) / 200.0
    vals = transverse_fd_extrapolated(g, alpha0, hy, 6)
    for got, m in zip(vals, basis.modes[:6]):
        assert got == pytest.approx(m.nu, rel=1e-7)


def test_strip_fd_counts_and_energy(basis_sym0_small, well_unit):
    g = Geometry(1.0, 1.0)
    fd = FDConfig(hx=0.05, hy=0.05, X=8.0)
    res = strip_fd(well_unit, g, fd)
    assert res.count == 1
    assert res.nu1_fd < (math.pi / 2.0) ** 2  # discrete threshold sits below
    # the FD gap agrees coarsely with the kernel solver at this resolution
    from deltaguide.spectrum import find_bound_states
    rep = find_bound_states(well_unit, basis_sym0_small)
    gap_fd = res.nu1_fd - res.energies[0]
    gap_bs = basis_sym0_small.nu1 - rep.ground_state.E
    assert gap_fd == pytest.approx(gap_bs, rel=0.05)


def test_strip_fd_no_state_for_repulsive():
    g = Geometry(1.0, 1.0)
    fd = FDConfig(hx=0.1, hy=0.05, X=6.0)
    res = strip_fd(rectangular_well(0.0, 0.5, 1.0), g, fd)
    assert res.count == 0


def test_strip_fd_gap_refines_toward_bs(basis_sym0, well_unit):
    # Richardson over (hx, hy) halvings drives the FD gap toward the kernel gap
    from deltaguide.spectrum import find_bound_states
    g = Geometry(1.0, 1.0)
    gaps = []
    for h in (0.1, 0.05, 0.025):
        res = strip_fd(well_unit, g, FDConfig(hx=h, hy=h, X=8.0))
        gaps.append(res.nu1_fd - res.energies[0])
    d12, d23 = gaps[0] - gaps[1], gaps[1] - gaps[2]
    gap_extrap = gaps[2] - d23 / (d12 / d23 - 1.0)
    rep = find_bound_states(well_unit, basis_sym0,
                            grid=None)
    gap_bs = basis_sym0.nu1 - rep.ground_state.E
    assert gap_extrap == pytest.approx(gap_bs, rel=2e-3)
