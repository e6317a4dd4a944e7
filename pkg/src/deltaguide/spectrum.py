"""Bound states below the threshold via the Birman-Schwinger reduction.

E < nu_1 is a discrete eigenvalue iff -1 is an eigenvalue of the
discretized kernel at k^2 = E.  The eigencurves mu_j(kappa1) of the kernel
are sampled on a geometric kappa1 grid, -1 crossings are bracketed and
bisected, and the resulting energies are cross-checked against the
implicit ground-state equations and the counting routines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bskernel import DiscretizedOperator, Grid, assemble, grid_for_profile
from .profiles import CouplingProfile
from .transverse import ModeBasis

__all__ = [
    "SpectralPoint",
    "SpectralReport",
    "CountResult",
    "bs_eigencurves",
    "find_bound_states",
    "solve_implicit_ground_state",
    "count_below",
    "schatten_norm",
]

MULTIPLICITY_TOL = 1e-6


@dataclass(frozen=True)
class SpectralPoint:
    E: float
    kappa1: float

    @property
    def k_sq(self) -> float:
        return self.E

    def __post_init__(self) -> None:
        if self.kappa1 < 0:
            raise ValueError("kappa1 must be >= 0")


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple[tuple[float, int], ...]  # (E, multiplicity), ascending E
    ground_state: SpectralPoint | None
    bs_eigencurve: tuple[tuple[float, float], ...]  # (kappa1, lowest eigenvalue)
    schatten_p_norms: dict[int, float] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return sum(m for _, m in self.eigenvalues)


def _kernel_at(kappa1: float, basis: ModeBasis, profile: CouplingProfile,
               grid: Grid) -> DiscretizedOperator:
    return assemble("FULL_K", basis.nu1 - kappa1 * kappa1, basis, profile, grid)


def bs_eigencurves(profile: CouplingProfile, basis: ModeBasis,
                   kappa1_grid, n_curves: int, grid: Grid | None = None) -> np.ndarray:
    """Lowest n_curves eigenvalues of the kernel at each kappa1; shape (len, n)."""
    kappa1_grid = np.asarray(kappa1_grid, dtype=float)
    if np.any(kappa1_grid <= 0):
        raise ValueError("all kappa1 samples must be positive")
    if grid is None:
        grid = grid_for_profile(profile)
    out = np.empty((len(kappa1_grid), n_curves))
    for i, kap in enumerate(kappa1_grid):
        ev = _kernel_at(kap, basis, profile, grid).eigenvalues()
        out[i] = ev[:n_curves]
    return out


def _default_kappa_grid(basis: ModeBasis, n: int = 48) -> np.ndarray:
    # geometric sweep from deep below threshold up to (almost) kappa1 = sqrt(nu1)
    top = math.sqrt(max(basis.nu1, 1e-12)) * (1.0 - 1e-9)
    if basis.nu1 <= 0:
        raise ValueError("threshold nu1 <= 0: no gap below the essential spectrum")
    return np.geomspace(1e-6, top, n)


def find_bound_states(profile: CouplingProfile, basis: ModeBasis,
                      tol: float = 1e-10, grid: Grid | None = None,
                      n_samples: int = 48) -> SpectralReport:
    """All discrete eigenvalues below nu1, by -1 crossings of the eigencurves.

    The rank-one part diverges like -1/kappa1 for profiles with an attractive
    component, so every bound eigencurve lies below -1 at small kappa1 and is
    bracketed against the sampled grid; each bracket is bisected to `tol` in
    kappa1.  Eigenvalues of the kernel within 1e-6 of -1 at a located
    crossing count toward the multiplicity.
    """
    if profile.is_zero:
        return SpectralReport(eigenvalues=(), ground_state=None, bs_eigencurve=())
    if grid is None:
        grid = grid_for_profile(profile)
    kaps = _default_kappa_grid(basis, n_samples)
    ev0 = _kernel_at(kaps[0], basis, profile, grid).eigenvalues()
    n_curves = max(1, int(np.sum(ev0 <= -1.0)) + 1)
    curves = np.empty((len(kaps), n_curves))
    curves[0] = ev0[:n_curves]
    for i in range(1, len(kaps)):
        curves[i] = _kernel_at(kaps[i], basis, profile, grid).eigenvalues()[:n_curves]

    crossings: list[float] = []
    for j in range(n_curves):
        g = curves[:, j] + 1.0
        for i in np.where(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
            f = lambda kap: float(_kernel_at(kap, basis, profile, grid).eigenvalues()[j]) + 1.0
            crossings.append(brentq(f, kaps[i], kaps[i + 1], xtol=tol))

    crossings.sort()
    merged: list[float] = []
    for c in crossings:
        if not merged or abs(c - merged[-1]) > max(10 * tol, 1e-8 * c):
            merged.append(c)

    eigs: list[tuple[float, int]] = []
    for kap in merged:
        ev = _kernel_at(kap, basis, profile, grid).eigenvalues()
        mult = int(np.sum(np.abs(ev + 1.0) < MULTIPLICITY_TOL))
        eigs.append((basis.nu1 - kap * kap, max(mult, 1)))
    eigs.sort()

    ground = None
    if eigs:
        kap_ground = math.sqrt(basis.nu1 - eigs[0][0])
        ground = SpectralPoint(E=eigs[0][0], kappa1=kap_ground)
    curve0 = tuple((float(k), float(c)) for k, c in zip(kaps, curves[:, 0]))
    return SpectralReport(eigenvalues=tuple(eigs), ground_state=ground,
                          bs_eigencurve=curve0)


def _implicit_rhs(z: float, profile: CouplingProfile, basis: ModeBasis,
                  grid: Grid, mode: str) -> tuple[float, float]:
    """G(z) of the implicit ground-state equation and the norm of P."""
    k_sq = basis.nu1 - z * z
    if mode == "WEAK_LAMBDA":
        pieces = ("A", "N")
    else:
        pieces = ("M", "N")
    P = sum(assemble(p, k_sq, basis, profile, grid).bs_matrix for p in pieces)
    norm_P = float(np.linalg.norm(P, 2))
    da = profile.delta_alpha(grid.points)
    half = np.sqrt(np.abs(da) * grid.weights)
    if mode == "WEAK_LAMBDA":
        envelope = np.exp(-z * np.abs(grid.points))
    else:
        envelope = np.ones_like(grid.points)
    g = envelope * half
    f = g * np.sign(da)
    sol = np.linalg.solve(np.eye(len(g)) + P, g)
    return -0.5 * basis.chi1_sq * float(f @ sol), norm_P


def solve_implicit_ground_state(profile: CouplingProfile, basis: ModeBasis,
                                mode: str = "WEAK_LAMBDA", tol: float = 1e-10,
                                grid: Grid | None = None) -> SpectralPoint | None:
    """Positive fixed point kappa1 = G(kappa1) of the implicit equation.

    mode WEAK_LAMBDA keeps the exponential envelopes e^(-kappa1|x|) and uses
    P = A + N; mode SCALED_SIGMA drops the envelopes and uses P = M + N.
    Requires the perturbative regime ||P|| < 1.
    """
    if mode not in ("WEAK_LAMBDA", "SCALED_SIGMA"):
        raise ValueError(f"unknown implicit-equation mode {mode!r}")
    if profile.is_zero:
        return None
    if grid is None:
        grid = grid_for_profile(profile)

    g0, norm_P = _implicit_rhs(1e-12, profile, basis, grid, mode)
    if norm_P >= 1.0:
        raise ValueError("outside the perturbative regime: ||P|| >= 1")
    if g0 <= 0.0:
        return None  # no positive solution branch

    # damped fixed-point iteration with a bisection safeguard
    z = g0
    top = math.sqrt(basis.nu1) * (1.0 - 1e-12)
    for _ in range(60):
        z = min(max(z, 1e-14), top)
        g, _ = _implicit_rhs(z, profile, basis, grid, mode)
        z_new = z + 0.5 * (g - z)
        if abs(z_new - z) < 0.1 * tol:
            z = z_new
            break
        z = z_new
    resid = lambda zz: zz - _implicit_rhs(zz, profile, basis, grid, mode)[0]
    r = resid(z)
    if abs(r) > tol:
        lo, hi = z, z
        step = max(abs(r), 1e-8)
        while resid(max(lo - step, 1e-14)) * r > 0 and lo > 1e-13:
            lo = max(lo - step, 1e-14)
            step *= 2
        while resid(min(hi + step, top)) * r > 0 and hi < top:
            hi = min(hi + step, top)
            step *= 2
        lo, hi = max(lo - step, 1e-14), min(hi + step, top)
        z = brentq(resid, lo, hi, xtol=tol)
    return SpectralPoint(E=basis.nu1 - z * z, kappa1=z)


def schatten_norm(op: DiscretizedOperator, p: float) -> float:
    """||K||_p from the singular values of the discretized kernel."""
    if p < 1:
        raise ValueError("Schatten index p must be >= 1")
    s = np.linalg.svd(op.bs_matrix, compute_uv=False)
    return float(np.sum(s**p) ** (1.0 / p))


@dataclass(frozen=True)
class CountResult:
    n_below: int
    schatten_pows: dict[int, float]  # p -> ||K||_p^p for the majorant kernel


def count_below(E: float, profile: CouplingProfile, basis: ModeBasis,
                grid: Grid | None = None) -> CountResult:
    """Number of eigenvalues below E, bounded through the attractive part.

    Replaces the perturbation by its negative part -gamma (which cannot
    decrease the count) and counts kernel eigenvalues <= -1 at k^2 = E;
    ||K||_p^p for p in {1, 2} are the corresponding Schatten bounds.
    """
    if E >= basis.nu1:
        raise ValueError("count_below needs E < nu1")
    gamma = profile.gamma_profile()
    if gamma.is_zero:
        return CountResult(n_below=0, schatten_pows={1: 0.0, 2: 0.0})
    if grid is None:
        grid = grid_for_profile(gamma)
    op = assemble("FULL_K", E, basis, gamma, grid)
    ev = op.eigenvalues()
    n = int(np.sum(ev <= -1.0))
    pows = {p: float(schatten_norm(op, p) ** p) for p in (1, 2)}
    return CountResult(n_below=n, schatten_pows=pows)
