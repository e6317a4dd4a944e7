"""Benchmark: mode-sum kernel assembly with the compiled kernels vs pure numpy.

The mode sum dominates every assembly of FULL_K / N (n_grid^2 x n_modes
work), so this is the hot path worth compiling.  Run directly:

    python3 benchmarks/bench_kernels.py

The numpy fallback is what you get with DELTAGUIDE_NO_NUMBA=1; here both
implementations are imported side by side and timed on identical inputs.
"""
import time

import numpy as np

from deltaguide import _kernels
from deltaguide._kernels import _modesum_numpy


def bench(n_grid: int, n_modes: int, repeats: int = 5) -> None:
    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(-1.0, 1.0, n_grid))
    kappas = np.sort(rng.uniform(0.5, 300.0, n_modes))
    coeffs = 1.0 / (2.0 * kappas)
    h = 2.0 / n_grid

    timings = {}
    if _kernels.USE_NUMBA:
        _kernels._modesum_numba(x, coeffs, kappas, h)  # compile once
        t = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            ref = _kernels._modesum_numba(x, coeffs, kappas, h)
            t.append(time.perf_counter() - t0)
        timings["numba"] = min(t)
    t = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = _modesum_numpy(x, coeffs, kappas, h)
        t.append(time.perf_counter() - t0)
    timings["numpy"] = min(t)

    line = f"n_grid={n_grid:5d} n_modes={n_modes:4d}"
    for name, dt in timings.items():
        line += f"  {name}: {dt * 1e3:8.2f} ms"
    if "numba" in timings:
        line += f"  speedup: {timings['numpy'] / timings['numba']:.1f}x"
        err = np.max(np.abs(ref - out))
        line += f"  max dev: {err:.1e}"
    print(line)


if __name__ == "__main__":
    print(f"compiled kernels active: {_kernels.USE_NUMBA}")
    for n_grid, n_modes in ((200, 60), (400, 200), (800, 200), (800, 400)):
        bench(n_grid, n_modes)
