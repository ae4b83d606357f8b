# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Dense covariance assembly from a distinct-lag table.

On a regular grid a stationary covariance takes only (2*nx-1)*(2*ny-1)
distinct values, one per integer lag.  Expanding that small table into the
full N x N matrix is the single O(N^2) inner loop of the sampler, so it is
done here in C.  The tables handed in are exactly even under lag negation,
which makes the output exactly symmetric without a mirroring pass.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def fill_from_lag_table_1d(double[::1] table, Py_ssize_t n):
    """Expand a (2n-1,) lag table into the (n, n) matrix R[i, j] = table[j - i + n - 1]."""
    if table.shape[0] != 2 * n - 1:
        raise ValueError("lag table must have length 2*n - 1")
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] r = out
    cdef Py_ssize_t i, j, off
    for i in range(n):
        off = n - 1 - i
        for j in range(n):
            r[i, j] = table[j + off]
    return out


def fill_from_lag_table_2d(double[:, ::1] table, Py_ssize_t nx, Py_ssize_t ny):
    """Expand a (2nx-1, 2ny-1) lag table into the dense (N, N) matrix, N = nx*ny.

    Nodes are flattened row-major with the y index fastest, so
    R[p, q] = table[i2 - i1 + nx - 1, j2 - j1 + ny - 1] for p = i1*ny + j1,
    q = i2*ny + j2.
    """
    if table.shape[0] != 2 * nx - 1 or table.shape[1] != 2 * ny - 1:
        raise ValueError("lag table must have shape (2*nx - 1, 2*ny - 1)")
    cdef Py_ssize_t N = nx * ny
    out = np.empty((N, N), dtype=np.float64)
    cdef double[:, ::1] r = out
    cdef Py_ssize_t i1, j1, i2, j2, p, q, joff
    cdef const double* trow
    p = 0
    for i1 in range(nx):
        for j1 in range(ny):
            q = 0
            for i2 in range(nx):
                trow = &table[i2 - i1 + nx - 1, ny - 1 - j1]
                for j2 in range(ny):
                    r[p, q] = trow[j2]
                    q += 1
            p += 1
    return out
