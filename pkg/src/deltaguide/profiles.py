"""Longitudinal coupling profiles alpha(x) = alpha0 + lam * (alpha - alpha0)(x/sigma).

Profiles are stored as piecewise-constant tables of the bare perturbation
alpha - alpha0; sampled callables are midpoint-discretized onto a fine
table so that every integral downstream shares one closed-form code path.
Double integrals of the form

    iint da(x) f(|x - x'|) da(x') dx dx'

are evaluated exactly per piece pair through the second antiderivative of f,
which keeps the |x - x'| kink out of the quadrature error budget.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = ["CouplingProfile", "rectangular_well", "piecewise_profile", "profile_from_callable"]


def _H_exp(v: np.ndarray, kappa: float) -> np.ndarray:
    """Second antiderivative of e^(-kappa |u|), normalized to H(0)=H'(0)=0."""
    t = kappa * np.abs(v)
    small = t < 1e-4
    out = np.empty_like(t)
    ts = t[small]
    out[small] = (ts * ts / 2.0 - ts**3 / 6.0 + ts**4 / 24.0) / kappa**2
    tb = t[~small]
    out[~small] = (tb - 1.0 + np.exp(-tb)) / kappa**2
    return out


def _H_abs(v: np.ndarray) -> np.ndarray:
    return np.abs(v) ** 3 / 6.0


def _H_abs_sq(v: np.ndarray) -> np.ndarray:
    return v**4 / 12.0


def _H_abs_exp(v: np.ndarray, kappa: float) -> np.ndarray:
    """Second antiderivative of |u| e^(-kappa |u|)."""
    t = kappa * np.abs(v)
    small = t < 1e-3
    out = np.empty_like(t)
    ts = t[small]
    out[small] = (ts**3 / 6.0 - ts**4 / 12.0 + ts**5 / 40.0) / kappa**3
    tb = t[~small]
    out[~small] = (tb - 2.0 + (2.0 + tb) * np.exp(-tb)) / kappa**3
    return out


_PAIR_KINDS = ("exp", "abs", "abs_sq", "abs_exp", "one")


@dataclass(frozen=True)
class CouplingProfile:
    """Perturbation of the barrier coupling around the background alpha0.

    breaks/values hold the bare table of alpha - alpha0 (zero outside the
    declared support); the effective perturbation is lam * table(x / sigma).
    """

    alpha0: float
    breaks: tuple[float, ...]
    values: tuple[float, ...]
    lam: float = 1.0
    sigma: float = 1.0
    eps: float = 1.0

    def __post_init__(self) -> None:
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or v.ndim != 1 or len(b) != len(v) + 1:
            raise ValueError("need len(breaks) == len(values) + 1")
        if len(v) == 0:
            raise ValueError("profile needs at least one piece")
        if not np.all(np.diff(b) > 0):
            raise ValueError("breaks must be strictly increasing")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(v))):
            raise ValueError("breaks and values must be finite")
        if self.lam < 0:
            raise ValueError("coupling multiplier lam must be >= 0")
        if not (0 < self.sigma <= 1):
            raise ValueError("scaling parameter sigma must lie in (0, 1]")

    # -- effective (lam, sigma applied) table ---------------------------------

    @cached_property
    def eff_breaks(self) -> np.ndarray:
        return np.asarray(self.breaks, dtype=float) * self.sigma

    @cached_property
    def eff_values(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float) * self.lam

    @property
    def support_halfwidth(self) -> float:
        return float(np.max(np.abs(self.eff_breaks)))

    def replace(self, **kw) -> "CouplingProfile":
        return dataclasses.replace(self, **kw)

    def delta_alpha(self, x) -> np.ndarray:
        """Effective perturbation lam * (alpha - alpha0)(x / sigma)."""
        x = np.asarray(x, dtype=float)
        b, v = self.eff_breaks, self.eff_values
        idx = np.searchsorted(b, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(v))
        out = np.zeros_like(x)
        out[inside] = v[idx[inside]]
        return out

    def sign(self, x) -> np.ndarray:
        return np.sign(self.delta_alpha(x))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.eff_values == 0.0)) or self.lam == 0.0

    @property
    def is_attractive(self) -> bool:
        return bool(np.all(self.eff_values <= 0.0))

    @property
    def is_repulsive(self) -> bool:
        return bool(np.all(self.eff_values >= 0.0))

    # -- one-dimensional integrals --------------------------------------------

    def integral(self) -> float:
        """Signed integral of the effective perturbation."""
        b, v = self.eff_breaks, self.eff_values
        return float(np.sum(v * np.diff(b)))

    def abs_moment(self, p: int) -> float:
        """Integral of |x|^p |delta_alpha(x)| over the support."""
        b, v = self.eff_breaks, self.eff_values
        h = np.sign(b) * np.abs(b) ** (p + 1) / (p + 1)
        return float(np.sum(np.abs(v) * (h[1:] - h[:-1])))

    def gamma_l1(self) -> float:
        """L1 norm of gamma = max(0, -(alpha - alpha0)) for the effective profile."""
        b, v = self.eff_breaks, self.eff_values
        return float(np.sum(np.maximum(0.0, -v) * np.diff(b)))

    def gamma_profile(self) -> "CouplingProfile":
        """Attractive majorant alpha0 - gamma with lam and sigma baked in."""
        return CouplingProfile(
            alpha0=self.alpha0,
            breaks=tuple(self.eff_breaks),
            values=tuple(np.minimum(self.eff_values, 0.0)),
            lam=1.0,
            sigma=1.0,
            eps=self.eps,
        )

    def attractive_majorant(self) -> "CouplingProfile":
        """-|alpha - alpha0| with lam and sigma baked in."""
        return CouplingProfile(
            alpha0=self.alpha0,
            breaks=tuple(self.eff_breaks),
            values=tuple(-np.abs(self.eff_values)),
            lam=1.0,
            sigma=1.0,
            eps=self.eps,
        )

    # -- pair integrals -------------------------------------------------------

    def _pair(self, H: Callable[[np.ndarray], np.ndarray], v: np.ndarray) -> float:
        b = self.eff_breaks
        Hm = H(b[:, None] - b[None, :])
        T = Hm[1:, :-1] - Hm[1:, 1:] - Hm[:-1, :-1] + Hm[:-1, 1:]
        return float(v @ T @ v)

    def pair_integral(self, kind: str, kappa: float | None = None, absolute: bool = False) -> float:
        """iint da(x) f(|x-x'|) da(x') with f selected by `kind`.

        kind: 'exp' -> e^(-kappa r), 'abs' -> r, 'abs_sq' -> r^2,
        'abs_exp' -> r e^(-kappa r), 'one' -> 1.
        With absolute=True the perturbation enters as |da|.
        """
        if kind not in _PAIR_KINDS:
            raise ValueError(f"unknown pair-integral kind {kind!r}")
        v = np.abs(self.eff_values) if absolute else self.eff_values
        if kind == "one":
            s = float(np.sum(v * np.diff(self.eff_breaks)))
            return s * s
        if kind == "abs":
            return self._pair(_H_abs, v)
        if kind == "abs_sq":
            return self._pair(_H_abs_sq, v)
        if kappa is None or kappa <= 0:
            raise ValueError(f"kind {kind!r} needs kappa > 0")
        if kind == "exp":
            return self._pair(lambda u: _H_exp(u, kappa), v)
        return self._pair(lambda u: _H_abs_exp(u, kappa), v)

    def pair_integral_exp_many(self, kappas: np.ndarray, absolute: bool = False) -> np.ndarray:
        """pair_integral('exp', kappa) evaluated for an array of kappas."""
        kappas = np.asarray(kappas, dtype=float)
        v = np.abs(self.eff_values) if absolute else self.eff_values
        b = self.eff_breaks
        out = np.empty(len(kappas))
        diffs = b[:, None] - b[None, :]
        # chunk over kappas to bound the (K, nb, nb) temporary
        chunk = max(1, int(2**22 / max(diffs.size, 1)))
        for s in range(0, len(kappas), chunk):
            ks = kappas[s:s + chunk]
            t = ks[:, None, None] * np.abs(diffs)[None, :, :]
            Hm = np.where(t < 1e-4,
                          t * t / 2.0 - t**3 / 6.0 + t**4 / 24.0,
                          t - 1.0 + np.exp(-np.minimum(t, 700.0)))
            Hm = Hm / (ks**2)[:, None, None]
            T = Hm[:, 1:, :-1] - Hm[:, 1:, 1:] - Hm[:, :-1, :-1] + Hm[:, :-1, 1:]
            out[s:s + chunk] = np.einsum("i,kij,j->k", v, T, v)
        return out

    # -- smoothed fields for the counting-bound contractions ------------------

    def exp_field(self, xs: np.ndarray, kappa: float, absolute: bool = False) -> np.ndarray:
        """u(x) = int da(x') e^(-kappa |x - x'|) dx' at the given points."""
        b = self.eff_breaks
        v = np.abs(self.eff_values) if absolute else self.eff_values
        u = xs[:, None] - b[None, :]
        F1 = np.sign(u) * (1.0 - np.exp(-kappa * np.abs(u))) / kappa
        return (F1[:, :-1] - F1[:, 1:]) @ v

    def abs_field(self, xs: np.ndarray, absolute: bool = False) -> np.ndarray:
        """v(x) = int da(x') |x - x'| dx' at the given points."""
        b = self.eff_breaks
        v = np.abs(self.eff_values) if absolute else self.eff_values
        u = xs[:, None] - b[None, :]
        F1 = u * np.abs(u) / 2.0
        return (F1[:, :-1] - F1[:, 1:]) @ v


def rectangular_well(alpha0: float, alpha1: float, a: float,
                     lam: float = 1.0, sigma: float = 1.0) -> CouplingProfile:
    """Steplike profile: alpha = alpha1 on |x| < a, alpha0 outside."""
    if a <= 0:
        raise ValueError("half-width a must be positive")
    return CouplingProfile(alpha0=alpha0, breaks=(-a, a), values=(alpha1 - alpha0,),
                           lam=lam, sigma=sigma)


def piecewise_profile(alpha0: float, breaks, values,
                      lam: float = 1.0, sigma: float = 1.0) -> CouplingProfile:
    return CouplingProfile(alpha0=alpha0, breaks=tuple(breaks), values=tuple(values),
                           lam=lam, sigma=sigma)


def profile_from_callable(alpha0: float, func: Callable[[np.ndarray], np.ndarray],
                          support: float, n_pieces: int = 2000,
                          lam: float = 1.0, sigma: float = 1.0) -> CouplingProfile:
    """Midpoint-discretize a callable alpha(x) - alpha0 with the given support."""
    if support <= 0:
        raise ValueError("support half-width must be positive")
    b = np.linspace(-support, support, n_pieces + 1)
    mids = 0.5 * (b[:-1] + b[1:])
    v = np.asarray(func(mids), dtype=float)
    return CouplingProfile(alpha0=alpha0, breaks=tuple(b), values=tuple(v),
                           lam=lam, sigma=sigma)
