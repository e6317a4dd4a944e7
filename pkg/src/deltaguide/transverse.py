"""Transverse eigenproblem of the unperturbed double guide.

The cross section is the interval (-d2, d1) with Dirichlet ends and a
delta coupling of strength alpha0 at y = 0.  Eigenvalues nu_n and the
boundary weights chi_n(0)^2 feed every downstream kernel; they are the
only eigenfunction data the rest of the package needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "Geometry",
    "TransverseMode",
    "ModeBasis",
    "secular_residual",
    "solve_modes",
    "h_bound",
]


@dataclass(frozen=True)
class Geometry:
    """Strip half-widths; the guide occupies R x (-d2, d1)."""

    d1: float
    d2: float

    def __post_init__(self) -> None:
        if not (self.d1 > 0 and self.d2 > 0):
            raise ValueError(f"half-widths must be positive, got d1={self.d1}, d2={self.d2}")

    @property
    def D(self) -> float:
        return self.d1 + self.d2


def _sinc_sqrt(z):
    """sin(sqrt(z))/sqrt(z) continued to an entire function of z."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-6
    zs = z[small]
    out[small] = 1.0 - zs / 6.0 + zs * zs / 120.0
    zb = z[~small]
    u = np.sqrt(np.abs(zb))
    vals = np.empty_like(u)
    pos = zb > 0
    vals[pos] = np.sin(u[pos]) / u[pos]
    vals[~pos] = np.sinh(u[~pos]) / u[~pos]
    out[~small] = vals
    return out


def _halfwave(d: float, nu):
    """sin(u d)/u as an entire function of nu = u^2."""
    return d * _sinc_sqrt(np.asarray(nu, dtype=float) * d * d)


def _halfwave_sq_integral(d: float, nu):
    """Integral of (sin(u t)/u)^2 over t in (0, d), entire in nu = u^2."""
    nu = np.asarray(nu, dtype=float)
    t = 2.0 * d * np.sqrt(np.abs(nu))
    out = np.empty_like(nu)
    small = t < 1e-2
    # (2du - sin 2du)/(4u^3) expanded around u = 0; hyperbolic branch
    # gives the same series with nu < 0.
    zs = nu[small] * d * d
    out[small] = (d**3 / 3.0) * (1.0 - zs * (2.0 / 10.0) + zs * zs * (4.0 / 168.0))
    nb, tb = nu[~small], t[~small]
    u3 = np.abs(nb) ** 1.5
    vals = np.empty_like(tb)
    pos = nb > 0
    vals[pos] = (tb[pos] - np.sin(tb[pos])) / (4.0 * u3[pos])
    vals[~pos] = (np.sinh(tb[~pos]) - tb[~pos]) / (4.0 * u3[~pos])
    out[~small] = vals
    return out


def secular_nu(nu, geometry: Geometry, alpha0: float):
    """Secular function F(nu) whose simple zeros are the transverse eigenvalues.

    F is entire in nu, valid on both sides of nu = 0, and equals
    [u sin(uD) + alpha0 sin(u d1) sin(u d2)] / nu for nu > 0.
    """
    d1, d2, D = geometry.d1, geometry.d2, geometry.D
    nu = np.asarray(nu, dtype=float)
    out = np.empty_like(nu)
    # deep nu < 0 overflows sinh; switch to the sign-equivalent rescaling
    # 2 u^2 e^(-uD) F(nu) with u = sqrt(-nu), which is bounded
    deep = nu < -((350.0 / D) ** 2)
    ud = np.sqrt(-nu[deep])
    out[deep] = (ud * (1.0 - np.exp(-2.0 * ud * D))
                 + 0.5 * alpha0 * (1.0 - np.exp(-2.0 * ud * d1))
                 * (1.0 - np.exp(-2.0 * ud * d2)))
    rest = ~deep
    nr = nu[rest]
    out[rest] = D * _sinc_sqrt(nr * D * D) + alpha0 * _halfwave(d1, nr) * _halfwave(d2, nr)
    return out


def secular_residual(u: float, geometry: Geometry, alpha0: float) -> float:
    """Residual f(u) = u sin(uD) + alpha0 sin(u d1) sin(u d2) for u > 0.

    Zeros of f on (0, inf) are exactly the square roots of the positive
    transverse eigenvalues.  The sign convention is fixed by the alpha0 = 0
    reduction f(u) = u sin(uD) and the Dirichlet decoupling at alpha0 -> inf.
    """
    if not (u > 0) or not math.isfinite(u):
        raise ValueError(f"secular residual needs u > 0, got u={u}")
    d1, d2 = geometry.d1, geometry.d2
    return u * math.sin(u * geometry.D) + alpha0 * math.sin(u * d1) * math.sin(u * d2)


def h_bound(u: float, d_j: float) -> float:
    """Boundary-weight envelope sqrt(u)|sin(d u)| / sqrt(2du - sin 2du).

    Bounds chi_n(0)^2 via chi_n(0)^2 <= 2 h(sqrt(nu_n); d1) h(sqrt(nu_n); d2);
    tends to (2d)^(-1/2) as u -> 0+.
    """
    if u < 0 or not math.isfinite(u):
        raise ValueError(f"h_bound needs u >= 0, got {u}")
    if d_j <= 0:
        raise ValueError("d_j must be positive")
    t = 2.0 * d_j * u
    if t < 1e-4:
        return 1.0 / math.sqrt(2.0 * d_j)
    if t < 1e-2:
        # 2du - sin 2du = t^3/6 (1 - t^2/20 + ...)
        denom = (t**3 / 6.0) * (1.0 - t * t / 20.0)
    else:
        denom = t - math.sin(t)
    return math.sqrt(u) * abs(math.sin(d_j * u)) / math.sqrt(denom)


def _chi0_sq(nu: float, geometry: Geometry) -> float:
    """chi_n(0)^2 for the L2-normalized eigenfunction, by closed-form integrals."""
    if nu < 0:
        # chi0^2 = 1 / sum_j T_j / q_j^2; the ratio is rewritten with coth so
        # that deep bound modes (large sqrt(-nu) d_j) do not overflow sinh
        u = math.sqrt(-nu)
        r = 0.0
        for d in (geometry.d1, geometry.d2):
            t = u * d
            if t > 5.0:
                e = math.exp(-2.0 * t)
                coth = 1.0 + 2.0 * e / (1.0 - e)
                r += (coth - 4.0 * t * e / (1.0 - e) ** 2) / (2.0 * u)
            else:
                q = math.sinh(t) / u
                T = (math.sinh(2.0 * t) - 2.0 * t) / (4.0 * u**3)
                r += T / (q * q)
        return 1.0 / r
    q1 = float(_halfwave(geometry.d1, nu))
    q2 = float(_halfwave(geometry.d2, nu))
    t1 = float(_halfwave_sq_integral(geometry.d1, nu))
    t2 = float(_halfwave_sq_integral(geometry.d2, nu))
    num = q1 * q1 * q2 * q2
    den = q2 * q2 * t1 + q1 * q1 * t2
    if den == 0.0:
        # both half-interval sines vanish: odd-type mode, chi(0) = 0
        return 0.0
    return num / den


@dataclass(frozen=True)
class TransverseMode:
    index: int
    nu: float
    chi0_sq: float

    def kappa_of(self, k_sq: float) -> float:
        """Transverse decay rate sqrt(nu_n - k^2); requires k^2 < nu_n."""
        if k_sq >= self.nu:
            raise ValueError(f"k^2={k_sq} is not below nu_{self.index}={self.nu}")
        return math.sqrt(self.nu - k_sq)


@dataclass(frozen=True)
class ModeBasis:
    geometry: Geometry
    alpha0: float
    modes: tuple[TransverseMode, ...]
    n_max: int

    @property
    def nu1(self) -> float:
        """Essential-spectrum threshold of the comparison operator."""
        return self.modes[0].nu

    @cached_property
    def nus(self) -> np.ndarray:
        return np.array([m.nu for m in self.modes])

    @cached_property
    def chi0_sqs(self) -> np.ndarray:
        return np.array([m.chi0_sq for m in self.modes])

    @cached_property
    def kappa_tilde(self) -> np.ndarray:
        """sqrt(nu_n - nu_1) for n >= 2 (index 0 is mode 2)."""
        return np.sqrt(self.nus[1:] - self.nu1)

    def kappas(self, k_sq: float) -> np.ndarray:
        """Decay rates sqrt(nu_n - k^2); k^2 = nu1 is allowed (kappa1 = 0)."""
        if k_sq > self.nu1:
            raise ValueError(f"spectral parameter k^2={k_sq} above threshold nu1={self.nu1}")
        return np.sqrt(np.maximum(self.nus - k_sq, 0.0))

    @property
    def chi1_sq(self) -> float:
        return self.modes[0].chi0_sq


def solve_modes(geometry: Geometry, alpha0: float, n_max: int) -> ModeBasis:
    """First n_max transverse modes, sorted by increasing nu.

    Roots of the secular function are located by a dense scan between the
    interlacing points {m pi/d1} U {m pi/d2} followed by Brent refinement;
    the scan extends to nu < 0 so that strongly attractive alpha0 (and the
    critical coupling alpha0 = -D/(d1 d2), where nu_1 = 0) are covered.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    nu_floor = -(alpha0 * alpha0) / 4.0 - 1.0 if alpha0 < 0 else -1e-9
    # interlacing points of sin(d1 u) sin(d2 u); roots cluster against them
    # exponentially for large |alpha0|
    m_top = n_max + 4
    union = np.unique(np.concatenate([
        np.arange(1, m_top + 1) * math.pi / geometry.d1,
        np.arange(1, m_top + 1) * math.pi / geometry.d2,
    ]))
    u_top = union[min(n_max + 2, len(union) - 1)]
    union = union[union <= u_top * (1 + 1e-12)]
    points_per_gap = 40
    for refine in range(4):
        base = np.linspace(1e-12, u_top, int(points_per_gap * (len(union) + 1)))
        offsets = np.concatenate([-np.geomspace(1e-13, 0.4, 30), np.geomspace(1e-13, 0.4, 30)])
        cluster = (union[:, None] * (1.0 + offsets[None, :])).ravel()
        u_grid = np.unique(np.concatenate([base, cluster]))
        u_grid = u_grid[(u_grid > 0) & (u_grid <= u_top)]
        nu_grid = np.concatenate([
            np.linspace(nu_floor, 0.0, 200, endpoint=False),
            u_grid**2,
        ])
        roots = _root_scan_from_grid(geometry, alpha0, nu_grid)
        if len(roots) >= n_max:
            break
        points_per_gap *= 4
    else:
        raise RuntimeError(
            f"bracketing failed: found {len(roots)} of {n_max} transverse roots "
            f"for d1={geometry.d1}, d2={geometry.d2}, alpha0={alpha0}")
    roots = roots[:n_max]
    modes = tuple(
        TransverseMode(index=i + 1, nu=nu, chi0_sq=_chi0_sq(nu, geometry))
        for i, nu in enumerate(roots)
    )
    return ModeBasis(geometry=geometry, alpha0=alpha0, modes=modes, n_max=n_max)


def _root_scan_from_grid(geometry: Geometry, alpha0: float, nu_grid: np.ndarray) -> list[float]:
    vals = secular_nu(nu_grid, geometry, alpha0)
    roots: list[float] = []
    f = lambda nu: float(secular_nu(nu, geometry, alpha0))
    for i in np.where(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(f, nu_grid[i], nu_grid[i + 1], xtol=1e-14, rtol=1e-15))
    for i in np.where(vals == 0.0)[0]:
        roots.append(float(nu_grid[i]))
    roots.sort()
    # drop duplicates from a zero landing exactly on a grid point
    dedup: list[float] = []
    for r in roots:
        if not dedup or abs(r - dedup[-1]) > 1e-10 * max(1.0, abs(r)):
            dedup.append(r)
    return dedup
