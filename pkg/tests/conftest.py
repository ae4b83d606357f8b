import numpy as np
import pytest

from gpsurf import Grid, SurfaceField


@pytest.fixture
def rng():
    return np.random.default_rng(20230303)


def make_field(heights, spacing=1.0, kind="latent"):
    heights = np.asarray(heights, dtype=np.float64)
    if heights.ndim == 1:
        grid = Grid((heights.size,), (spacing,))
        return SurfaceField(grid, heights, kind=kind)
    grid = Grid(heights.shape, (spacing, spacing))
    return SurfaceField(grid, heights.reshape(-1), kind=kind)
