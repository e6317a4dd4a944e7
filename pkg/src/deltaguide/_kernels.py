"""Mode-sum matrix assembly, the hot loop of the package.

The dominant cost everywhere is building dense matrices of the form

    M_ij = sum_n c_n e^(-kappa_n |x_i - x_j|)

for a few hundred modes on a few hundred grid points.  A numba-compiled
kernel is used when available; set DELTAGUIDE_NO_NUMBA=1 to force the pure
numpy path (both are exercised by the benchmark script).
"""
from __future__ import annotations

import os

import numpy as np

USE_NUMBA = not os.environ.get("DELTAGUIDE_NO_NUMBA")
if USE_NUMBA:
    try:
        from numba import njit, prange
    except ImportError:
        USE_NUMBA = False


def _diag_average(coeffs: np.ndarray, kappas: np.ndarray, h: float) -> float:
    # cell average of the kernel over the midpoint cell, (1/h) int e^(-k|t|)
    return float(np.sum(coeffs * 2.0 * (1.0 - np.exp(-kappas * h / 2.0)) / (kappas * h)))


def _modesum_numpy(x: np.ndarray, coeffs: np.ndarray, kappas: np.ndarray,
                   h: float) -> np.ndarray:
    r = np.abs(x[:, None] - x[None, :])
    out = np.zeros((len(x), len(x)))
    # loop over modes to keep memory at one matrix
    for c, k in zip(coeffs, kappas):
        out += c * np.exp(-k * r)
    np.fill_diagonal(out, _diag_average(coeffs, kappas, h))
    return out


if USE_NUMBA:

    @njit(parallel=True, cache=True)
    def _modesum_numba(x, coeffs, kappas, h):  # pragma: no cover - compiled
        m = x.shape[0]
        n = coeffs.shape[0]
        out = np.empty((m, m))
        diag = 0.0
        for q in range(n):
            diag += coeffs[q] * 2.0 * (1.0 - np.exp(-kappas[q] * h / 2.0)) / (kappas[q] * h)
        for i in prange(m):
            out[i, i] = diag
            for j in range(i + 1, m):
                r = abs(x[i] - x[j])
                s = 0.0
                for q in range(n):
                    s += coeffs[q] * np.exp(-kappas[q] * r)
                out[i, j] = s
                out[j, i] = s
        return out


def modesum_matrix(x: np.ndarray, coeffs: np.ndarray, kappas: np.ndarray,
                   h: float) -> np.ndarray:
    """Dense sum_n c_n e^(-kappa_n |x_i-x_j|) with cell-averaged diagonal.

    The diagonal entry is the cell average 2(1 - e^(-kappa h/2))/(kappa h)
    per mode, which regularizes the integrable kink/log singularity of the
    mode sum at x = x' without breaking Nystrom convergence.
    """
    x = np.ascontiguousarray(x, dtype=float)
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    kappas = np.ascontiguousarray(kappas, dtype=float)
    if len(coeffs) == 0:
        return np.zeros((len(x), len(x)))
    if USE_NUMBA:
        return _modesum_numba(x, coeffs, kappas, float(h))
    return _modesum_numpy(x, coeffs, kappas, float(h))
