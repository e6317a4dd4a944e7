import math

import numpy as np
import pytest

from deltaguide.bskernel import (Grid, assemble, grid_for_profile, hs_norm,
                                 kernel_full, make_grid, tail_estimate)
from deltaguide.profiles import piecewise_profile, rectangular_well


def test_make_grid_midpoint():
    g = make_grid(1.5, 6)
    assert g.n == 6
    assert g.h == pytest.approx(0.5)
    assert float(np.sum(g.weights)) == pytest.approx(3.0, rel=1e-15)
    np.testing.assert_allclose(g.points, [-1.25, -0.75, -0.25, 0.25, 0.75, 1.25])
    with pytest.raises(ValueError):
        make_grid(0.0, 10)
    with pytest.raises(ValueError):
        Grid(points=np.zeros(3), weights=np.zeros(2), X=1.0)


def test_grid_for_profile(well_unit):
    g = grid_for_profile(well_unit, n=100)
    assert g.X == pytest.approx(1.0)
    g = grid_for_profile(well_unit, n=100, pad=0.5)
    assert g.X == pytest.approx(1.5)


@pytest.fixture(scope="module")
def setup(basis_sym0_small, well_unit):
    grid = grid_for_profile(well_unit, n=400)
    k_sq = basis_sym0_small.nu1 - 0.3
    return basis_sym0_small, well_unit, grid, k_sq


def test_splitting_identity_qan(setup):
    basis, prof, grid, k_sq = setup
    full = assemble("FULL_K", k_sq, basis, prof, grid).matrix
    parts = sum(assemble(kind, k_sq, basis, prof, grid).matrix
                for kind in ("Q", "A", "N"))
    assert np.max(np.abs(full - parts)) < 1e-13 * np.max(np.abs(full))


def test_splitting_identity_lmn(setup):
    basis, prof, grid, k_sq = setup
    full = assemble("FULL_K", k_sq, basis, prof, grid).matrix
    parts = sum(assemble(kind, k_sq, basis, prof, grid).matrix
                for kind in ("L", "M", "N"))
    assert np.max(np.abs(full - parts)) < 1e-13 * np.max(np.abs(full))


def test_rank_one_parts(setup):
    basis, prof, grid, k_sq = setup
    for kind in ("Q", "L"):
        sv = np.linalg.svd(assemble(kind, k_sq, basis, prof, grid).matrix,
                           compute_uv=False)
        assert sv[1] < 1e-13 * sv[0]


def test_threshold_limits(setup):
    basis, prof, grid, _ = setup
    nu1 = basis.nu1
    for kind, kind0 in (("A", "A0"), ("M", "M0")):
        lim = assemble(kind0, None, basis, prof, grid).matrix
        prev = np.inf
        for kappa1 in (1e-2, 1e-4, 1e-6):
            m = assemble(kind, nu1 - kappa1**2, basis, prof, grid).matrix
            err = np.max(np.abs(m - lim))
            assert err < prev
            prev = err
        # error scales linearly in kappa1
        assert prev < 1e-8


def test_kappa1_singular_kinds_raise(setup):
    basis, prof, grid, _ = setup
    for kind in ("FULL_K", "Q", "L"):
        with pytest.raises(ValueError):
            assemble(kind, basis.nu1, basis, prof, grid)


def test_assemble_argument_errors(setup):
    basis, prof, grid, k_sq = setup
    with pytest.raises(ValueError):
        assemble("BOGUS", k_sq, basis, prof, grid)
    with pytest.raises(ValueError):
        assemble("FULL_K", None, basis, prof, grid)
    with pytest.raises(ValueError):
        assemble("N0beta", None, basis, prof, grid, beta=0.0)


def test_matrix_symmetric_and_matches_pointwise_kernel(setup):
    basis, prof, grid, k_sq = setup
    op = assemble("FULL_K", k_sq, basis, prof, grid)
    assert np.max(np.abs(op.matrix - op.matrix.T)) < 1e-15
    # off-diagonal entries are h * pointwise kernel (attractive well: sign -1)
    i, j = 17, 301
    ref = kernel_full(grid.points[i], grid.points[j], k_sq, basis, prof)
    assert op.bs_matrix[i, j] == pytest.approx(-grid.h * abs(ref), rel=1e-10)


def test_kernel_decay_rate(setup):
    # log-slope of the kernel in |x - x'| approaches kappa1 at large separation
    basis, prof, _, k_sq = setup
    kappa1 = basis.kappas(k_sq)[0]
    r1, r2 = 30.0, 40.0
    v1 = kernel_full(0.0, r1, k_sq, basis, prof.replace(breaks=(-50.0, 50.0)))
    v2 = kernel_full(0.0, r2, k_sq, basis, prof.replace(breaks=(-50.0, 50.0)))
    slope = -math.log(abs(v2) / abs(v1)) / (r2 - r1)
    assert slope == pytest.approx(kappa1, rel=1e-9)


def test_eigenvalue_routes_agree_for_mixed_signs(basis_sym0_small):
    # dipole profile has both signs; compare the symmetrized route against
    # direct nonsymmetric eigenvalues of S D
    prof = piecewise_profile(0.0, (-1.0, 0.0, 1.0), (0.8, -1.2))
    grid = grid_for_profile(prof, n=200)
    op = assemble("FULL_K", basis_sym0_small.nu1 - 0.5, basis_sym0_small, prof, grid)
    ev_sym = op.eigenvalues()
    ev_direct = np.sort(np.real(np.linalg.eigvals(op.bs_matrix)))
    big = np.abs(ev_sym) > 1e-10
    matched = [ev_direct[np.argmin(np.abs(ev_direct - e))] for e in ev_sym[big]]
    np.testing.assert_allclose(matched, ev_sym[big], rtol=1e-8, atol=1e-12)


def test_eigenvalues_sign_definite(setup):
    basis, prof, grid, k_sq = setup
    op = assemble("FULL_K", k_sq, basis, prof, grid)
    ev = op.eigenvalues()
    # attractive profile: all eigenvalues of K D are <= 0
    assert np.all(ev <= 1e-14)
    assert op.op_norm() == pytest.approx(np.max(np.abs(ev)), rel=1e-12)


def test_hs_norm_and_tail(setup):
    basis, prof, grid, k_sq = setup
    op = assemble("N", k_sq, basis, prof, grid)
    assert hs_norm(op) == pytest.approx(np.linalg.norm(op.matrix, "fro"))
    t = tail_estimate(basis, k_sq, delta_min=0.1)
    assert 0 < t < 1e-8


def test_full_kernel_nmax_convergence(basis_sym0, basis_sym0_small, well_unit):
    k_sq = basis_sym0.nu1 - 0.3
    v_small = kernel_full(-0.4, 0.3, k_sq, basis_sym0_small, well_unit)
    v_big = kernel_full(-0.4, 0.3, k_sq, basis_sym0, well_unit)
    assert v_small == pytest.approx(v_big, rel=1e-10)


def test_grid_refinement_consistency(basis_sym0_small, well_unit):
    # leading eigenvalue settles under grid refinement
    k_sq = basis_sym0_small.nu1 - 0.3
    vals = []
    for n in (100, 200, 400, 800):
        grid = grid_for_profile(well_unit, n=n)
        op = assemble("FULL_K", k_sq, basis_sym0_small, well_unit, grid)
        vals.append(op.eigenvalues()[0])
    errs = np.abs(np.diff(vals))
    assert errs[-1] < errs[0]
    assert abs(vals[-1] - vals[-2]) < 5e-5 * abs(vals[-1])
