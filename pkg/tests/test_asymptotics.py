import math

import numpy as np
import pytest

from deltaguide.asymptotics import (dirichlet_limit_sweep, existence_criterion,
                                    scaled_expansion, weak_coupling_expansion)
from deltaguide.profiles import piecewise_profile, rectangular_well
from deltaguide.spectrum import solve_implicit_ground_state
from deltaguide.transverse import Geometry


def test_first_order_coefficient_unit_well(basis_sym0, well_unit):
    # c1 = -(1/2) chi1^2 int da = -(1/2)(1)(-2) = 1
    coeffs = weak_coupling_expansion(well_unit, basis_sym0)
    assert coeffs.c1_lambda == pytest.approx(1.0, rel=1e-10)
    assert coeffs.c1_sigma == coeffs.c1_lambda
    assert coeffs.c_energy == pytest.approx(1.0, rel=1e-10)
    assert coeffs.tail_rel < 1e-5


def test_zero_profile_coefficients(basis_sym0_small, well_unit):
    # lam is the expansion parameter and is factored out, so only an
    # identically zero table gives zero coefficients
    coeffs = weak_coupling_expansion(well_unit.replace(values=(0.0,)),
                                     basis_sym0_small)
    assert coeffs.c1_lambda == 0.0 and coeffs.c2_lambda == 0.0
    coeffs = weak_coupling_expansion(well_unit.replace(lam=0.0), basis_sym0_small)
    assert coeffs.c1_lambda == pytest.approx(1.0, rel=1e-10)


def test_lambda_remainder_is_third_order(basis_sym0, well_unit):
    coeffs = weak_coupling_expansion(well_unit, basis_sym0)
    lams = np.array([0.04, 0.02, 0.01])
    rems = []
    for lam in lams:
        pt = solve_implicit_ground_state(well_unit.replace(lam=lam), basis_sym0)
        rems.append(abs(pt.kappa1 - coeffs.predict_kappa1_lambda(lam)))
    slope = np.polyfit(np.log(lams), np.log(rems), 1)[0]
    assert slope == pytest.approx(3.0, abs=0.4)
    # first order dominates at small lambda
    pt = solve_implicit_ground_state(well_unit.replace(lam=0.01), basis_sym0)
    assert pt.kappa1 / 0.01 == pytest.approx(coeffs.c1_lambda, rel=0.01)


def test_sigma_remainder_is_third_order(basis_sym0):
    # shallow well: the sigma^3 term dominates throughout the window (for
    # deep wells the sigma^3 and sigma^4 terms nearly cancel around
    # sigma ~ 0.03, which inflates the fitted slope)
    prof = rectangular_well(0.0, -0.3, 1.0)
    sigmas = np.array([0.2, 0.1, 0.05])
    rems = []
    for s in sigmas:
        coeffs, pred = scaled_expansion(prof, basis_sym0, s)
        pt = solve_implicit_ground_state(prof.replace(sigma=s), basis_sym0,
                                         mode="SCALED_SIGMA")
        rems.append(abs(pt.kappa1 - pred))
    slope = np.polyfit(np.log(sigmas), np.log(rems), 1)[0]
    assert slope == pytest.approx(3.0, abs=0.4)


def test_second_order_sigma_keeps_exponential(basis_sym0, well_unit):
    # the sigma^2 term is NOT (sigma^2/4) chi1^2 sum chi_n^2 I0 / kt_n (the
    # expanded form); it retains e^(-sigma kt r) and is strictly smaller
    coeffs = weak_coupling_expansion(well_unit, basis_sym0)
    s = 0.1
    kt = basis_sym0.kappa_tilde
    expanded = 0.25 * s**2 * basis_sym0.chi1_sq * float(
        np.sum(basis_sym0.chi0_sqs[1:] / kt) * well_unit.pair_integral("one"))
    kept = coeffs.second_order_sigma(s)
    assert 0 < kept < expanded
    with pytest.raises(ValueError):
        coeffs.second_order_sigma(0.0)


def test_second_order_identity(basis_sym0, well_unit):
    # the mode-sum parts of c2_lambda and of the sigma^2 term at sigma = 1
    # are the same object with opposite sign convention, so
    # c2_lambda - second_order_sigma(1) = -(1/4) chi1^4 iint da |x-x'| da
    coeffs = weak_coupling_expansion(well_unit, basis_sym0)
    lhs = coeffs.c2_lambda - coeffs.second_order_sigma(1.0)
    rhs = -0.25 * basis_sym0.chi1_sq**2 * well_unit.pair_integral("abs")
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_mean_zero_dipole_positive_c2(basis_sym0):
    prof = piecewise_profile(0.0, (-1.0, 0.0, 1.0), (1.0, -1.0))
    coeffs = weak_coupling_expansion(prof, basis_sym0)
    assert coeffs.c1_lambda == pytest.approx(0.0, abs=1e-14)
    assert coeffs.c2_lambda > 0
    assert existence_criterion(prof)


def test_existence_criterion():
    assert existence_criterion(rectangular_well(0.0, -1.0, 1.0))
    assert not existence_criterion(rectangular_well(0.0, 1.0, 1.0))
    assert existence_criterion(rectangular_well(0.0, 1.0, 1.0, lam=0.0))


def test_expansion_matches_bs_energy(basis_sym0, well_unit):
    # E = nu1 - (c1 lam)^2 + O(lam^3) against the implicit solver
    lam = 0.02
    coeffs = weak_coupling_expansion(well_unit, basis_sym0)
    pt = solve_implicit_ground_state(well_unit.replace(lam=lam), basis_sym0)
    E_pred = basis_sym0.nu1 - (coeffs.c1_lambda * lam) ** 2
    assert pt.E == pytest.approx(E_pred, abs=5e-5)


def test_scaled_expansion_requires_finite_moment(basis_sym0_small, well_unit):
    coeffs, pred = scaled_expansion(well_unit, basis_sym0_small, 0.1)
    assert pred == pytest.approx(coeffs.predict_kappa1_sigma(0.1))


def test_dirichlet_limit_trend(well_unit):
    rows = dirichlet_limit_sweep(Geometry(1.0, 1.0), well_unit, sigma=0.1,
                                 alpha0_values=(1e1, 1e2, 1e3), n_max=80)
    nu1s = [r["nu1"] for r in rows]
    # nu1 climbs monotonically toward the Dirichlet value pi^2
    assert all(np.diff(nu1s) > 0)
    assert abs(nu1s[-1] - math.pi**2) / math.pi**2 < 0.05
    assert all(np.isfinite(r["second_term"]) for r in rows)
