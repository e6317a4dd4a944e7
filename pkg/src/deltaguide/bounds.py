"""Upper bounds on the number of bound states below the threshold.

Three routes: the general quadruple-integral bound driven by the negative
part gamma of the perturbation, its closed form for the rectangular well,
and the bracketing (minimax) bound.  The quadruple integrals factor into
one- and two-point contractions of gamma, so the default strategy is exact
per-piece quadrature; a seeded Monte Carlo fallback covers profiles where
that is impractical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import CouplingProfile
from .transverse import ModeBasis

__all__ = [
    "CountBounds",
    "skn_bound_general",
    "skn_bound_rectwell",
    "bracketing_bound",
]


@dataclass(frozen=True)
class CountBounds:
    skn_general: float
    skn_rectwell: float | None
    bracketing_upper: int
    bracketing_lower: int
    schatten: dict[int, float]


def _gamma_table(profile: CouplingProfile) -> CouplingProfile:
    """Nonnegative gamma = max(0, -(alpha - alpha0)) as a bare table."""
    vals = np.maximum(0.0, -profile.eff_values)
    return CouplingProfile(alpha0=profile.alpha0, breaks=tuple(profile.eff_breaks),
                           values=tuple(vals), lam=1.0, sigma=1.0)


def _gauss_nodes(profile: CouplingProfile, order: int = 24):
    """Gauss-Legendre nodes/weights per constant piece of the profile."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    b = profile.eff_breaks
    mid = 0.5 * (b[:-1] + b[1:])
    half = 0.5 * np.diff(b)
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    gvals = np.repeat(profile.eff_values, order)
    return nodes, weights * gvals


def skn_bound_general(profile: CouplingProfile, basis: ModeBasis,
                      strategy: str = "quad", n_samples: int = 1_000_000,
                      seed: int = 0) -> float:
    """General counting bound 1 + three quadruple integrals over gamma.

    quad strategy: the integrals are reduced to pair integrals (exact per
    piece) and single integrals of smoothed fields (per-piece Gauss rule).
    mc strategy: importance sampling from gamma/||gamma||_1 with the mode
    sums collapsed to the scalar kernel s(r) = sum c_n e^(-kt_n r).
    """
    if strategy not in ("quad", "mc"):
        raise ValueError(f"unknown strategy {strategy!r}")
    gam = _gamma_table(profile)
    norm1 = gam.integral()
    if norm1 == 0.0:
        raise ValueError("bound requires a nonzero negative part gamma")
    chi1 = basis.chi1_sq
    kt = basis.kappa_tilde
    c = basis.chi0_sqs[1:] / kt  # weights of the scalar kernel s(r)

    if strategy == "mc":
        return 1.0 + _skn_terms_mc(gam, chi1, c, kt, norm1, n_samples, seed)[0]

    I_abs = gam.pair_integral("abs")
    I_abs2 = gam.pair_integral("abs_sq")
    nodes, gw = _gauss_nodes(gam)
    v = gam.abs_field(nodes)
    int_gv2 = float(gw @ v**2)
    term1 = chi1 * chi1 / (4.0 * norm1**2) * (
        I_abs2 * norm1**2 + I_abs**2 - 2.0 * norm1 * int_gv2)

    E = gam.pair_integral_exp_many(kt)
    ksum = kt[:, None] + kt[None, :]
    E_pair = gam.pair_integral_exp_many(ksum.ravel()).reshape(ksum.shape)
    U = np.empty((len(kt), len(nodes)))
    for i, k in enumerate(kt):
        U[i] = gam.exp_field(nodes, k)
    G = (U * gw[None, :]) @ U.T  # G_mn = int gamma u_m u_n
    cc = np.outer(c, c)
    term2 = float(np.sum(cc * (norm1**2 * E_pair + np.outer(E, E)
                               - 2.0 * norm1 * G))) / (4.0 * norm1**2)

    AE = np.array([gam.pair_integral("abs_exp", k) for k in kt])
    int_gvu = (gw * v) @ U.T  # per mode: int gamma v u_n
    term3 = -chi1 / (2.0 * norm1**2) * float(
        np.sum(c * (norm1**2 * AE + I_abs * E - 2.0 * norm1 * int_gvu)))

    return 1.0 + term1 + term2 + term3


def _skn_terms_mc(gam: CouplingProfile, chi1: float, c: np.ndarray, kt: np.ndarray,
                  norm1: float, n_samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo value and standard error of the three-term sum."""
    rng = np.random.default_rng(seed)
    b = gam.eff_breaks
    masses = np.asarray(gam.eff_values) * np.diff(b)
    cdf = np.cumsum(masses) / np.sum(masses)

    def draw(n):
        u = rng.random(n)
        idx = np.searchsorted(cdf, u)
        lo, hi = b[idx], b[idx + 1]
        return lo + (hi - lo) * rng.random(n)

    def s_of(r):
        out = np.zeros_like(r)
        for ci, ki in zip(c, kt):
            out += ci * np.exp(-ki * r)
        return out

    total = np.empty(0)
    chunk = 100_000
    done = 0
    vals_acc = []
    while done < n_samples:
        n = min(chunk, n_samples - done)
        x1, x2, x3, x4 = draw(n), draw(n), draw(n), draw(n)
        r12, r34 = np.abs(x1 - x2), np.abs(x3 - x4)
        r13, r24 = np.abs(x1 - x3), np.abs(x2 - x4)
        combo_abs = r12 + r34 - r13 - r24
        s12, s34, s13, s24 = s_of(r12), s_of(r34), s_of(r13), s_of(r24)
        combo_s = s12 + s34 - s13 - s24
        f = (chi1 * chi1 / 4.0 * r12 * combo_abs
             + 0.25 * s12 * combo_s
             - chi1 / 2.0 * r12 * combo_s)
        vals_acc.append(f)
        done += n
    vals = np.concatenate(vals_acc)
    # quadruple integral = ||gamma||_1^4 E[f]; prefactors carry 1/||gamma||_1^2
    scale = norm1**2
    mean = float(np.mean(vals)) * scale
    se = float(np.std(vals) / math.sqrt(len(vals))) * scale
    return mean, se


def _rect_E(a: float, k: np.ndarray) -> np.ndarray:
    """iint_{[-a,a]^2} e^(-k|x-y|) dx dy, unit depth."""
    g = 1.0 - np.exp(-2.0 * a * k)
    return 4.0 * a / k - 2.0 * g / k**2


def _rect_AE(a: float, k: np.ndarray) -> np.ndarray:
    """iint_{[-a,a]^2} |x-y| e^(-k|x-y|) dx dy, unit depth."""
    T = 2.0 * a
    e = np.exp(-k * T)
    I1 = (1.0 - e * (k * T + 1.0)) / k**2
    I2 = (2.0 - e * (k**2 * T**2 + 2.0 * k * T + 2.0)) / k**3
    return 2.0 * (T * I1 - I2)


def skn_bound_rectwell(a: float, gamma: float, basis: ModeBasis) -> float:
    """Closed-form counting bound for the steplike well of depth gamma on |x|<a.

    Exact specialization of the general quadruple-integral bound: for the
    constant profile every contraction has an elementary antiderivative, so
    the three terms reduce to single and double mode sums.  The diagonal
    m = n of the double sum needs the analytic limit of the divided
    difference of e^(-2ak), which is substituted for nearly equal rates.
    """
    if a <= 0 or gamma <= 0:
        raise ValueError("need a > 0 and gamma > 0")
    chi1 = basis.chi1_sq
    kt = basis.kappa_tilde
    chi = basis.chi0_sqs[1:]
    norm1 = 2.0 * a * gamma
    g = 1.0 - np.exp(-2.0 * a * kt)

    # term 1: the |x1-x2| (...) quadruple integral evaluates to (8/45) a^4 terms
    term1 = 8.0 / 45.0 * chi1 * chi1 * gamma**2 * a**4

    # term 2: bracket = n1^2 E(km+kn) + E(km)E(kn) - 2 n1 G_mn with
    # G_mn = int gamma u_m u_n dx, u_k(x) = (gamma/k)(2 - e^(-k(a-x)) - e^(-k(a+x)))
    km, kn = kt[:, None], kt[None, :]
    gm, gn = g[:, None], g[None, :]
    ks = km + kn
    gs = 1.0 - np.exp(-2.0 * a * ks)
    degenerate = np.abs(km - kn) < 1e-8 * km
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = (np.exp(-2.0 * a * kn) - np.exp(-2.0 * a * km)) / np.where(degenerate, 1.0, km - kn)
    # removable singularity: divided difference -> derivative 2a e^(-2ak)
    delta = np.where(degenerate, 2.0 * a * np.exp(-2.0 * a * km), delta)
    G_mn = gamma**3 / (km * kn) * (8.0 * a - 4.0 * gm / km - 4.0 * gn / kn
                                   + 2.0 * gs / ks + 2.0 * delta)
    bracket2 = (norm1**2 * gamma**2 * _rect_E(a, ks)
                + gamma**4 * _rect_E(a, km) * _rect_E(a, kn)
                - 2.0 * norm1 * G_mn)
    w2 = np.outer(chi / kt, chi / kt)
    term2 = float(np.sum(w2 * bracket2)) / (4.0 * norm1**2)

    # term 3: bracket = n1^2 AE(k) + I_abs E(k) - 2 n1 int gamma v u_k with
    # v(x) = gamma (x^2 + a^2)
    T = 2.0 * a
    e = np.exp(-kt * T)
    J = ((2.0 - e * (4.0 * a**2 * kt**2 + 4.0 * a * kt + 2.0)) / kt**3
         - 2.0 * a * (1.0 - e * (2.0 * a * kt + 1.0)) / kt**2
         + 2.0 * a**2 * g / kt)
    int_gvu = gamma**3 / kt * (16.0 * a**3 / 3.0 - 2.0 * J)
    I_abs = gamma**2 * 8.0 * a**3 / 3.0
    bracket3 = (norm1**2 * gamma**2 * _rect_AE(a, kt)
                + I_abs * gamma**2 * _rect_E(a, kt)
                - 2.0 * norm1 * int_gvu)
    term3 = -chi1 / (2.0 * norm1**2) * float(np.sum(chi / kt * bracket3))

    return 1.0 + term1 + term2 + term3


def bracketing_bound(a: float, basis_at_alpha0: ModeBasis,
                     basis_at_alpha1: ModeBasis) -> tuple[int, int]:
    """Minimax bracketing bound (upper, lower = upper - 1) for the steplike well."""
    if basis_at_alpha1.alpha0 >= basis_at_alpha0.alpha0:
        raise ValueError("bracketing bound needs alpha1 < alpha0")
    gap = basis_at_alpha0.nu1 - basis_at_alpha1.nu1
    upper = 1 + int(math.floor(2.0 * a / math.pi * math.sqrt(gap)))
    return upper, upper - 1
