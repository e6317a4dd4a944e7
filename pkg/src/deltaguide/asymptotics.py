"""Weak-coupling expansions of the gap parameter sqrt(nu1 - E).

Two small parameters are supported: the overall coupling multiplier
(lambda) and the longitudinal support scale (sigma).  Coefficients are
evaluated with the same transverse-mode truncation as the spectral solver
so that remainder studies measure the true expansion order rather than
truncation mismatch.  All double integrals use the closed per-piece forms
of the profile module, so there is no quadrature error on piecewise
profiles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import CouplingProfile
from .transverse import Geometry, ModeBasis, solve_modes

__all__ = [
    "ExpansionCoefficients",
    "weak_coupling_expansion",
    "scaled_expansion",
    "existence_criterion",
    "dirichlet_limit_sweep",
]


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Coefficients of sqrt(nu1 - E) in the small parameter.

    lambda form: sqrt(nu1-E) = c1_lambda * lam + c2_lambda * lam^2 + O(lam^3).
    sigma form:  sqrt(nu1-E) = c1_sigma * sigma + second_order(sigma) + O(sigma^3),
    where the sigma^2 term keeps the exponential e^(-sigma kt |x-x'|) inside
    the mode sum (it must not be expanded; the expanded sum may diverge).
    c_energy is the c of E = nu1 - c lam^2 + O(lam^3), equal to c1_lambda^2
    for attractive mean.
    """

    c1_lambda: float
    c2_lambda: float
    c1_sigma: float
    c_energy: float
    n_max: int
    tail_rel: float
    _basis: ModeBasis
    _profile: CouplingProfile

    def second_order_sigma(self, sigma: float) -> float:
        """The full sigma^2 term of the scaled expansion at the given sigma."""
        if not (0 < sigma <= 1):
            raise ValueError("sigma must lie in (0, 1]")
        kt = self._basis.kappa_tilde
        J = self._profile.pair_integral_exp_many(sigma * kt)
        return 0.25 * sigma**2 * self._basis.chi1_sq * float(
            np.sum(self._basis.chi0_sqs[1:] / kt * J))

    def predict_kappa1_lambda(self, lam: float) -> float:
        return self.c1_lambda * lam + self.c2_lambda * lam * lam

    def predict_kappa1_sigma(self, sigma: float) -> float:
        return self.c1_sigma * sigma + self.second_order_sigma(sigma)


def _bare(profile: CouplingProfile) -> CouplingProfile:
    """Profile with lam and sigma reset; expansions are in those parameters."""
    return profile.replace(lam=1.0, sigma=1.0)


def weak_coupling_expansion(profile: CouplingProfile, basis: ModeBasis) -> ExpansionCoefficients:
    """First- and second-order coefficients of sqrt(nu1 - E) in lambda.

    c1 = -(1/2) chi1^2 int da;
    c2 = -(1/4) { chi1^4 iint da |x-x'| da
                  - chi1^2 sum_{n>=2} chi_n^2 iint da e^(-kt_n r)/kt_n da }.
    """
    bare = _bare(profile)
    if bare.is_zero:
        return ExpansionCoefficients(0.0, 0.0, 0.0, 0.0, basis.n_max, 0.0, basis, bare)
    chi1 = basis.chi1_sq
    I = bare.integral()
    c1 = -0.5 * chi1 * I
    I_abs = bare.pair_integral("abs")
    kt = basis.kappa_tilde
    J_terms = basis.chi0_sqs[1:] / kt * bare.pair_integral_exp_many(kt)
    J = float(np.sum(J_terms))
    c2 = -0.25 * (chi1 * chi1 * I_abs - chi1 * J)
    total = abs(chi1 * chi1 * I_abs) + abs(chi1 * J)
    tail_rel = abs(chi1 * J_terms[-1]) / total if total > 0 else 0.0
    c_energy = c1 * c1 if I < 0 else 0.0
    return ExpansionCoefficients(c1_lambda=c1, c2_lambda=c2, c1_sigma=c1,
                                 c_energy=c_energy, n_max=basis.n_max,
                                 tail_rel=tail_rel, _basis=basis, _profile=bare)


def scaled_expansion(profile: CouplingProfile, basis: ModeBasis,
                     sigma: float) -> tuple[ExpansionCoefficients, float]:
    """Coefficients plus the predicted kappa1 at the given sigma.

    The sigma^2 term carries no |x-x'| contribution (its analogue vanishes
    at order sigma^4 in the Hilbert-Schmidt norm), unlike the lambda form.
    """
    coeffs = weak_coupling_expansion(profile, basis)
    if not math.isfinite(profile.abs_moment(2)):
        raise ValueError("scaled expansion needs a finite |x|^2 moment")
    return coeffs, coeffs.predict_kappa1_sigma(sigma)


def existence_criterion(profile: CouplingProfile, tol: float = 1e-12) -> bool:
    """True iff a weakly coupled bound state exists: int (alpha-alpha0) <= 0.

    Values within tol of zero are treated as the (existing) boundary case.
    """
    return profile.integral() <= tol


def dirichlet_limit_sweep(geometry: Geometry, profile: CouplingProfile,
                          sigma: float = 0.1,
                          alpha0_values=(1e1, 1e2, 1e3, 1e4),
                          n_max: int = 200) -> list[dict]:
    """Diagnostic sweep toward the impenetrable-barrier limit.

    Reports the first and second terms of the sigma expansion for growing
    alpha0.  No limit statement is implied: whether the limit commutes with
    the mode summation is an open question, so only the trend is reported.
    """
    rows = []
    for a0 in alpha0_values:
        basis = solve_modes(geometry, float(a0), n_max)
        coeffs = weak_coupling_expansion(profile.replace(alpha0=float(a0)), basis)
        rows.append({
            "alpha0": float(a0),
            "nu1": basis.nu1,
            "first_term": coeffs.c1_sigma * sigma,
            "second_term": coeffs.second_order_sigma(sigma),
        })
    return rows
