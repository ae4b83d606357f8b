"""NumPy fallback for the dense covariance fill.

Same contracts as the compiled `_fillcore`: tables are exactly even under
lag negation and the expanded matrix is exactly symmetric.
"""

import numpy as np
from scipy.linalg import toeplitz


def fill_from_lag_table_1d(table, n):
    table = np.ascontiguousarray(table, dtype=np.float64)
    if table.shape != (2 * n - 1,):
        raise ValueError("lag table must have length 2*n - 1")
    # R[i, j] = table[j - i + n - 1]: first column walks the lags backwards,
    # first row forwards.
    return toeplitz(table[n - 1 :: -1], table[n - 1 :])


def fill_from_lag_table_2d(table, nx, ny):
    table = np.ascontiguousarray(table, dtype=np.float64)
    if table.shape != (2 * nx - 1, 2 * ny - 1):
        raise ValueError("lag table must have shape (2*nx - 1, 2*ny - 1)")
    ix = np.arange(nx)
    iy = np.arange(ny)
    dix = (ix[None, :] - ix[:, None] + nx - 1).astype(np.intp)
    diy = (iy[None, :] - iy[:, None] + ny - 1).astype(np.intp)
    dense = table[dix[:, None, :, None], diy[None, :, None, :]]
    return dense.reshape(nx * ny, nx * ny)
