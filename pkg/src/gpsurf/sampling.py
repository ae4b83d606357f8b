"""Exact sampling of zero-mean Gaussian fields on regular grids.

The latent field on the grid nodes is multivariate normal with a dense
covariance matrix assembled from the stationary ACVF; samples are drawn as
``L @ u`` with ``L`` the (jittered) Cholesky factor and ``u`` standard
normal.  Everything is seeded and reproducible: the same grid, kernel, seed
and count give byte-identical heights on one platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import get_lapack_funcs

from gpsurf import _core, kernels
from gpsurf.errors import GridTooLargeError, NotPositiveSemidefiniteError

#: Default hard cap on grid points for exact dense sampling (about 256x256).
DEFAULT_POINT_CAP = 65536

#: Jitter ladder relative to the mean diagonal: start, growth, abort level.
JITTER_START = 1e-10
JITTER_GROWTH = 10.0
JITTER_MAX = 1e-4


@dataclass(frozen=True)
class Grid:
    """Regular 1-D or 2-D sampling lattice.

    Node ``(i, j)`` sits at ``(origin[0] + i*spacing[0],
    origin[1] + j*spacing[1])`` and flattening is row-major with the second
    index fastest.
    """

    shape: tuple
    spacing: tuple
    origin: tuple = None

    def __init__(self, shape, spacing, origin=None):
        shape = tuple(int(n) for n in np.atleast_1d(shape))
        spacing = tuple(float(d) for d in np.atleast_1d(spacing))
        if len(shape) not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if len(spacing) != len(shape):
            raise ValueError("spacing must give one value per axis")
        if any(n < 1 for n in shape):
            raise ValueError("grid must have at least one point per axis")
        if any(not (math.isfinite(d) and d > 0) for d in spacing):
            raise ValueError("grid spacing must be positive and finite")
        if origin is None:
            origin = (0.0,) * len(shape)
        origin = tuple(float(x) for x in np.atleast_1d(origin))
        if len(origin) != len(shape):
            raise ValueError("origin must give one value per axis")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

    @property
    def dim(self):
        return len(self.shape)

    @property
    def n_points(self):
        n = 1
        for s in self.shape:
            n *= s
        return n

    def axis_coords(self, axis):
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def positions(self):
        """All node positions, shape (N, dim), row-major (second index fastest)."""
        if self.dim == 1:
            return self.axis_coords(0)[:, None]
        xs = self.axis_coords(0)
        ys = self.axis_coords(1)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass
class SurfaceField:
    """Heights sampled on a grid, either latent (noise-free) or noisy."""

    grid: Grid
    heights: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.heights = np.asarray(self.heights, dtype=np.float64)
        if self.kind not in ("latent", "noisy"):
            raise ValueError("kind must be 'latent' or 'noisy'")
        if self.heights.shape != (self.grid.n_points,):
            raise ValueError("heights length must equal the grid point count")
        if not np.all(np.isfinite(self.heights)):
            raise ValueError("heights must be finite")

    def heights_2d(self):
        if self.grid.dim != 2:
            raise ValueError("heights_2d requires a 2-D grid")
        return self.heights.reshape(self.grid.shape)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor with the diagonal jitter that was applied."""

    lower: np.ndarray
    jitter: float


def _check_cap(grid, max_points):
    if grid.n_points > max_points:
        raise GridTooLargeError(grid.n_points, max_points)


def _even_lag_table(acvf, grid):
    """Evaluate the ACVF at every distinct grid lag, exactly symmetrized.

    Stationary ACVFs satisfy r(tau) = r(-tau); the table is mirrored through
    its center so that equality holds bitwise, making the expanded matrix
    exactly symmetric by construction.
    """
    if grid.dim == 1:
        n = grid.shape[0]
        taus = np.arange(-(n - 1), n) * grid.spacing[0]
        table = np.ascontiguousarray(kernels.evaluate(acvf, taus))
    else:
        nx, ny = grid.shape
        tx = np.arange(-(nx - 1), nx) * grid.spacing[0]
        ty = np.arange(-(ny - 1), ny) * grid.spacing[1]
        taus = np.empty((tx.size, ty.size, 2))
        taus[..., 0] = tx[:, None]
        taus[..., 1] = ty[None, :]
        table = np.ascontiguousarray(kernels.evaluate(acvf, taus))
    flat = table.reshape(-1)
    center = flat.size // 2
    if flat.size > 1:
        flat[center + 1 :] = flat[center - 1 :: -1]
    return table


def build_covariance(grid, acvf, max_points=DEFAULT_POINT_CAP):
    """Dense covariance matrix R[p, q] = r(x_q - x_p) on the grid nodes.

    The result is exactly symmetric with r(0) on the diagonal.  Grids above
    ``max_points`` are rejected because the dense matrix scales as N^2.
    """
    kernels.require_valid(acvf)
    if getattr(acvf, "dim", None) != grid.dim:
        raise ValueError(
            f"ACVF dimension {getattr(acvf, 'dim', None)} does not match grid dimension {grid.dim}"
        )
    _check_cap(grid, max_points)
    table = _even_lag_table(acvf, grid)
    if grid.dim == 1:
        return _core.fill_from_lag_table_1d(table, grid.shape[0])
    return _core.fill_from_lag_table_2d(table, grid.shape[0], grid.shape[1])


def _max_asymmetry(matrix, block=256):
    worst = 0.0
    n = matrix.shape[0]
    for start in range(0, n, block):
        stop = min(start + block, n)
        rows = matrix[start:stop, :]
        cols = matrix[:, start:stop]
        worst = max(worst, float(np.max(np.abs(rows - cols.T))))
    return worst


def _jitter_ladder(scale):
    levels = [0.0]
    level = JITTER_START
    while level <= JITTER_MAX * (1.0 + 1e-12):
        levels.append(level * scale)
        level *= JITTER_GROWTH
    return levels


def _inplace_potrf(matrix):
    """Lower-Cholesky factorization without an extra matrix copy.

    The transpose view of a C-contiguous symmetric matrix is the
    Fortran-contiguous array LAPACK wants, and equals the matrix itself, so
    the factorization can consume the buffer directly.  The buffer is
    destroyed on failure.
    """
    (potrf,) = get_lapack_funcs(("potrf",), (matrix,))
    view = matrix.T if matrix.flags.c_contiguous else matrix
    factor, info = potrf(view, lower=1, clean=1, overwrite_a=1)
    return factor, int(info)


def cholesky_with_jitter(matrix, symmetry_tol=1e-12):
    """Factor ``matrix + jitter*I`` with an escalating diagonal jitter.

    The ladder starts at zero, then walks 1e-10 * mean(diag) upwards by
    factors of ten and gives up above 1e-4 * mean(diag); this separates
    rounding-level indefiniteness from genuinely invalid kernels.  The
    applied jitter is reported alongside the factor.  The input matrix is
    left untouched (each attempt works on a fresh copy).
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("covariance matrix must be square")
    if _max_asymmetry(matrix) > symmetry_tol:
        raise ValueError(f"covariance matrix is not symmetric to {symmetry_tol:g}")
    mean_diag = float(np.mean(np.diagonal(matrix)))
    last_pivot = 0
    ladder = _jitter_ladder(mean_diag if mean_diag > 0 else 1.0)
    for jitter in ladder:
        attempt = np.array(matrix, order="F", copy=True)
        if jitter > 0.0:
            attempt[np.diag_indices_from(attempt)] += jitter
        factor, info = _inplace_potrf(attempt)
        if info == 0:
            return CholeskyFactor(lower=factor, jitter=jitter)
        last_pivot = info
    raise NotPositiveSemidefiniteError(pivot=last_pivot, max_jitter=ladder[-1])


def _factor_grid_covariance(grid, acvf):
    """Jitter-ladder factorization that peaks at a single dense matrix.

    Dense matrices at the point cap do not leave room for a working copy,
    so each rung rebuilds the matrix from the (tiny) lag table and factors
    the fresh buffer in place.  The numbers are identical to factoring the
    :func:`build_covariance` output.
    """
    table = _even_lag_table(acvf, grid)
    scale = acvf.value_at_zero()  # the diagonal is r(0) everywhere
    last_pivot = 0
    ladder = _jitter_ladder(scale if scale > 0 else 1.0)
    for jitter in ladder:
        if grid.dim == 1:
            matrix = _core.fill_from_lag_table_1d(table, grid.shape[0])
        else:
            matrix = _core.fill_from_lag_table_2d(table, grid.shape[0], grid.shape[1])
        if jitter > 0.0:
            matrix[np.diag_indices_from(matrix)] += jitter
        factor, info = _inplace_potrf(matrix)
        if info == 0:
            return CholeskyFactor(lower=factor, jitter=jitter)
        last_pivot = info
        del matrix, factor
    raise NotPositiveSemidefiniteError(pivot=last_pivot, max_jitter=ladder[-1])


def sample_latent(grid, acvf, rng_seed, count=1, max_points=DEFAULT_POINT_CAP):
    """Draw ``count`` exact latent fields, one factorization for all draws.

    Sample k consumes generator states k*N .. (k+1)*N - 1, so draws within a
    call differ while a repeated call with the same seed reproduces the same
    list.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    kernels.require_valid(acvf)
    _check_cap(grid, max_points)
    n = grid.n_points
    rng = np.random.default_rng(rng_seed)
    draws = rng.standard_normal((count, n))
    if isinstance(acvf, kernels.WhiteNoiseAcvf):
        # R = variance * I factors exactly to sqrt(variance) * I; skip the
        # dense assembly (identical output bytes, none of the N^2 cost).
        heights = math.sqrt(acvf.variance) * draws
        jitter = 0.0
    else:
        factor = _factor_grid_covariance(grid, acvf)
        jitter = factor.jitter
        heights = draws @ factor.lower.T
    fields = []
    for k in range(count):
        meta = {"seed": int(rng_seed), "sample_index": k, "jitter": jitter}
        fields.append(SurfaceField(grid, heights[k], kind="latent", meta=meta))
    return fields


def add_gaussian_noise(surface, sigma, rng_seed):
    """Observation model: heights plus independent N(0, sigma^2) noise."""
    sigma = float(sigma)
    if sigma < 0:
        raise ValueError("noise sigma must be non-negative")
    if surface.kind != "latent":
        raise ValueError("noise is added to latent fields only")
    if sigma == 0.0:
        noisy = surface.heights.copy()
    else:
        rng = np.random.default_rng(rng_seed)
        noisy = surface.heights + sigma * rng.standard_normal(surface.heights.shape)
    meta = dict(surface.meta)
    meta.update({"noise_sigma": sigma, "noise_seed": int(rng_seed)})
    return SurfaceField(surface.grid, noisy, kind="noisy", meta=meta)


def sample_covariance_mae(grid, acvf, n_samples, rng_seed, max_points=DEFAULT_POINT_CAP):
    """Element-wise mean absolute error between R and the sample covariance.

    The estimator uses the known zero mean, Rhat = (1/n) * sum g g^T, which
    is unbiased without a per-sample mean subtraction.  The mean runs over
    all N^2 elements.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    kernels.require_valid(acvf)
    _check_cap(grid, max_points)
    n = grid.n_points
    rng = np.random.default_rng(rng_seed)
    draws = rng.standard_normal((n_samples, n))
    if isinstance(acvf, kernels.WhiteNoiseAcvf):
        samples = math.sqrt(acvf.variance) * draws
    else:
        factor = _factor_grid_covariance(grid, acvf)
        samples = draws @ factor.lower.T
        del factor
    matrix = build_covariance(grid, acvf, max_points)
    total = 0.0
    block = max(1, min(n, 2**24 // max(n, 1)))
    for start in range(0, n, block):
        stop = min(start + block, n)
        block_hat = (samples[:, start:stop].T @ samples) / n_samples
        total += float(np.sum(np.abs(block_hat - matrix[start:stop, :])))
    return total / (n * n)


def predicted_covariance_mae(grid, acvf, n_samples, max_points=DEFAULT_POINT_CAP):
    """Large-sample prediction of the covariance MAE.

    For the zero-mean estimator, Var(Rhat_ij) = (R_ii R_jj + R_ij^2) / n and
    the expected absolute deviation of a centered normal is sqrt(2 Var / pi);
    the prediction averages that over all elements.
    """
    matrix = build_covariance(grid, acvf, max_points)
    n = grid.n_points
    diag = np.diagonal(matrix)
    total = 0.0
    block = max(1, min(n, 2**24 // max(n, 1)))
    for start in range(0, n, block):
        stop = min(start + block, n)
        var = (diag[start:stop, None] * diag[None, :] + matrix[start:stop, :] ** 2) / n_samples
        total += float(np.sum(np.sqrt(2.0 * var / math.pi)))
    return total / (n * n)


def core_backend():
    """Name of the active covariance-fill backend: 'compiled' or 'python'."""
    return _core.backend_name
