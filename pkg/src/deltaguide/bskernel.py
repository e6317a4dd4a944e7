"""Discretized Birman-Schwinger operators for the delta-barrier strip.

The operator with kernel

    K(x,x') = |da(x)|^(1/2) sum_n (chi_n(0)^2 / 2 kappa_n)
              e^(-kappa_n |x-x'|) sgn(da(x')) |da(x')|^(1/2)

(da = alpha - alpha0, kappa_n = sqrt(nu_n - k^2)) is assembled as a
Nystrom matrix on a midpoint grid.  Because the square-root factors vanish
outside the perturbation support, the grid only needs to cover the support;
padding adds exact zero rows.  The rank-one singular part (Q or L), the
regular remainders (A, N or M, N) and their threshold limits (A0, M0,
N0beta) are assembled by the same rule so the splitting identities hold
entry by entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._kernels import modesum_matrix
from .profiles import CouplingProfile
from .transverse import ModeBasis

__all__ = [
    "KINDS",
    "Grid",
    "DiscretizedOperator",
    "make_grid",
    "grid_for_profile",
    "kernel_full",
    "assemble",
    "hs_norm",
    "tail_estimate",
]

KINDS = ("FULL_K", "Q", "A", "N", "L", "M", "A0", "M0", "N0beta")
_NEEDS_KAPPA1 = ("FULL_K", "Q", "A", "N", "L", "M")
_KAPPA1_SINGULAR = ("FULL_K", "Q", "L")


@dataclass(frozen=True)
class Grid:
    """Uniform midpoint rule on [-X, X]; sum of weights is exactly 2X."""

    points: np.ndarray
    weights: np.ndarray
    X: float

    def __post_init__(self) -> None:
        if len(self.points) != len(self.weights) or len(self.points) == 0:
            raise ValueError("points and weights must be nonempty and equal length")

    @property
    def h(self) -> float:
        return float(self.weights[0])

    @property
    def n(self) -> int:
        return len(self.points)


def make_grid(halfwidth: float, n: int) -> Grid:
    if halfwidth <= 0 or n < 2:
        raise ValueError("need halfwidth > 0 and n >= 2")
    h = 2.0 * halfwidth / n
    points = -halfwidth + h * (np.arange(n) + 0.5)
    return Grid(points=points, weights=np.full(n, h), X=float(halfwidth))


def grid_for_profile(profile: CouplingProfile, n: int = 400, pad: float = 0.0) -> Grid:
    """Midpoint grid covering the perturbation support (plus optional pad)."""
    return make_grid(profile.support_halfwidth + pad, n)


def _xlt_xgt(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ax = np.abs(x)
    xgt = np.maximum(ax[:, None], ax[None, :])
    same_side = np.sign(x[:, None] * x[None, :])
    xlt = np.maximum(0.0, np.minimum(ax[:, None], ax[None, :]) * same_side)
    return xlt, xgt


def _bare_kernel(kind: str, x: np.ndarray, basis: ModeBasis, k_sq: float,
                 beta: float, h: float) -> np.ndarray:
    """Mode-sum factor of the kernel, without the square-root sandwich."""
    chi1 = basis.chi1_sq
    if kind in ("A0", "M0", "N0beta"):
        if kind == "A0":
            xlt, _ = _xlt_xgt(x)
            return chi1 * xlt
        if kind == "M0":
            return -0.5 * chi1 * np.abs(x[:, None] - x[None, :])
        kt = beta * basis.kappa_tilde
        return modesum_matrix(x, basis.chi0_sqs[1:] / (2.0 * kt), kt, h)

    kappas = basis.kappas(k_sq)
    kappa1 = kappas[0]
    if kappa1 == 0.0 and kind in _KAPPA1_SINGULAR:
        raise ValueError("rank-one part diverges at threshold (kappa1 = 0)")
    r = np.abs(x[:, None] - x[None, :])
    if kind == "N":
        return modesum_matrix(x, basis.chi0_sqs[1:] / (2.0 * kappas[1:]), kappas[1:], h)
    if kind == "FULL_K":
        tail = modesum_matrix(x, basis.chi0_sqs[1:] / (2.0 * kappas[1:]), kappas[1:], h)
        return chi1 / (2.0 * kappa1) * np.exp(-kappa1 * r) + tail
    if kind == "Q":
        e = np.exp(-kappa1 * np.abs(x))
        return chi1 / (2.0 * kappa1) * np.outer(e, e)
    if kind == "L":
        return np.full((len(x), len(x)), chi1 / (2.0 * kappa1))
    if kind == "A":
        xlt, xgt = _xlt_xgt(x)
        if kappa1 == 0.0:
            return chi1 * xlt
        return chi1 / kappa1 * np.exp(-kappa1 * xgt) * np.sinh(kappa1 * xlt)
    if kind == "M":
        if kappa1 == 0.0:
            return -0.5 * chi1 * r
        return chi1 / (2.0 * kappa1) * (np.exp(-kappa1 * r) - 1.0)
    raise ValueError(f"unknown kernel kind {kind!r}")


@dataclass(frozen=True)
class DiscretizedOperator:
    """Symmetrized Nystrom matrix sqrt(w_i) |da|^(1/2) F |da|^(1/2) sqrt(w_j).

    The sign of the perturbation is kept as a separate diagonal; the actual
    Birman-Schwinger matrix is `matrix @ diag(signs)`.  Spectra of that
    product are computed through the symmetric form S^(1/2) D S^(1/2), which
    shares its nonzero eigenvalues with S D.
    """

    matrix: np.ndarray
    signs: np.ndarray
    grid: Grid
    kind: str
    k_sq: float | None
    beta: float = 1.0

    @property
    def bs_matrix(self) -> np.ndarray:
        return self.matrix * self.signs[None, :]

    @cached_property
    def _is_sign_definite(self) -> bool:
        nz = self.signs[self.signs != 0.0]
        return len(nz) == 0 or bool(np.all(nz == nz[0]))

    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues of the discretized operator, ascending."""
        if self._is_sign_definite:
            nz = self.signs[self.signs != 0.0]
            s = nz[0] if len(nz) else 1.0
            return np.sort(s * np.linalg.eigvalsh(self.matrix))
        # mixed signs: matrix is PSD for the assembled kinds used in spectra,
        # so S D is isospectral (up to zeros) to S^(1/2) D S^(1/2)
        w, U = np.linalg.eigh(self.matrix)
        root = U * np.sqrt(np.maximum(w, 0.0))[None, :]
        sym = (root.T * self.signs[None, :]) @ root  # = S^(1/2) D S^(1/2) spectrum-wise
        return np.sort(np.linalg.eigvalsh(sym))

    def op_norm(self) -> float:
        """Spectral norm of the Birman-Schwinger matrix."""
        return float(np.linalg.norm(self.bs_matrix, 2))


def assemble(kind: str, k_sq: float | None, basis: ModeBasis,
             profile: CouplingProfile, grid: Grid, beta: float = 1.0) -> DiscretizedOperator:
    """Assemble one kernel piece on the grid.

    k_sq is required (and must be < nu1) for the kinds that depend on the
    spectral parameter; the threshold-limit kinds A0, M0, N0beta ignore it.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if kind in _NEEDS_KAPPA1:
        if k_sq is None:
            raise ValueError(f"kind {kind!r} needs a spectral parameter k_sq")
    if kind == "N0beta" and not (beta > 0):
        raise ValueError("N0beta needs beta > 0")
    x = grid.points
    F = _bare_kernel(kind, x, basis, 0.0 if k_sq is None else k_sq, beta, grid.h)
    da = profile.delta_alpha(x)
    half = np.sqrt(np.abs(da) * grid.weights)
    matrix = half[:, None] * F * half[None, :]
    return DiscretizedOperator(matrix=matrix, signs=np.sign(da), grid=grid,
                               kind=kind, k_sq=k_sq, beta=beta)


def kernel_full(x: float, x_prime: float, k_sq: float, basis: ModeBasis,
                profile: CouplingProfile) -> float:
    """Pointwise full kernel value (off-diagonal; x = x' diverges like log)."""
    if k_sq >= basis.nu1:
        raise ValueError("spectral parameter above threshold")
    kappas = basis.kappas(k_sq)
    r = abs(x - x_prime)
    s = float(np.sum(basis.chi0_sqs / (2.0 * kappas) * np.exp(-kappas * r)))
    da_x = float(profile.delta_alpha(np.array([x]))[0])
    da_xp = float(profile.delta_alpha(np.array([x_prime]))[0])
    root_signed = math.sqrt(abs(da_xp)) * (1.0 if da_xp >= 0 else -1.0)
    return math.sqrt(abs(da_x)) * s * root_signed


def hs_norm(op: DiscretizedOperator) -> float:
    """Hilbert-Schmidt (Frobenius) norm of the discretized operator."""
    return float(np.linalg.norm(op.matrix, "fro"))


def tail_estimate(basis: ModeBasis, k_sq: float, delta_min: float) -> float:
    """Geometric-series estimate of the neglected mode tail beyond n_max.

    Modes behave like kappa_n ~ pi n / D for large n, so successive terms at
    off-diagonal distance delta_min shrink at least geometrically; the last
    retained term times the ratio sum bounds the remainder.
    """
    kappas = basis.kappas(k_sq)
    if len(kappas) < 3:
        raise ValueError("need at least three modes for a tail estimate")
    last = basis.chi0_sqs[-1] / (2.0 * kappas[-1]) * math.exp(-kappas[-1] * delta_min)
    ratio = math.exp(-(kappas[-1] - kappas[-2]) * delta_min)
    if ratio >= 1.0:
        return math.inf
    return float(last * ratio / (1.0 - ratio))
