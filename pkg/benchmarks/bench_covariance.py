#!/usr/bin/env python3
"""Benchmark: compiled covariance fill vs the NumPy fallback.

Dense assembly is the only O(N^2) loop the package owns (factorization and
sampling are LAPACK/BLAS), so this is the piece the compiled core exists
for.  Both backends expand the same exactly-even lag table; the comparison
is pure fill speed plus the one-off table evaluation.

Run from the repository root:

    python benchmarks/bench_covariance.py
"""

import time

import numpy as np

from gpsurf import _core
from gpsurf.kernels import ExponentialRotatedAcvf, SpectralMixtureAcvf
from gpsurf.sampling import Grid, _even_lag_table

CASES = [
    ("exp-rot 64x64", Grid((64, 64), (1.0, 1.0)), ExponentialRotatedAcvf(1.0, 10.0, 2.0, np.pi / 6)),
    ("exp-rot 100x100", Grid((100, 100), (1.0, 1.0)), ExponentialRotatedAcvf(1.0, 10.0, 2.0, np.pi / 6)),
    (
        "mixture Q=5 n=4096",
        Grid((4096,), (1.0,)),
        SpectralMixtureAcvf(
            np.full(5, 0.2), np.linspace(0.02, 0.4, 5), np.full(5, 1e-3)
        ),
    ),
]


def run_fill(backend, table, grid, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        if grid.dim == 1:
            backend.fill_from_lag_table_1d(table, grid.shape[0])
        else:
            backend.fill_from_lag_table_2d(table, grid.shape[0], grid.shape[1])
        best = min(best, time.perf_counter() - start)
    return best


def main():
    if _core.compiled is None:
        print("compiled core not available; benchmarking the fallback only")
    print(f"{'case':<22}{'table (s)':>12}{'python (s)':>12}{'compiled (s)':>14}{'speedup':>9}")
    for name, grid, acvf in CASES:
        start = time.perf_counter()
        table = _even_lag_table(acvf, grid)
        t_table = time.perf_counter() - start
        t_py = run_fill(_core.fallback, table, grid)
        if _core.compiled is not None:
            t_c = run_fill(_core.compiled, table, grid)
            print(f"{name:<22}{t_table:>12.4f}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>8.1f}x")
        else:
            print(f"{name:<22}{t_table:>12.4f}{t_py:>12.4f}{'-':>14}{'-':>9}")


if __name__ == "__main__":
    main()
