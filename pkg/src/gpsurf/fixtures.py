"""Deterministic synthetic fixtures for turned profiles and surfaces.

Measured turning data is not shipped with the package, so these generators
stand in for it: a profile that is a sum of two harmonics (fundamental
period 50 grid steps) plus Gaussian noise, and a surface that is periodic
along x and nearly constant along y.  Both are fully determined by their
seeds; the files under ``fixtures/`` are produced by
``scripts/generate_fixtures.py`` and must never be hand-edited.
"""

from __future__ import annotations

import math

import numpy as np

from gpsurf.sampling import Grid, SurfaceField
from gpsurf.spectral import Profile

TURNED_PERIOD = 50.0
TURNED_PROFILE_SEED = 414213562
TURNED_SURFACE_SEED = 271828182


def turned_profile(n_points=2000, spacing=1.0, seed=TURNED_PROFILE_SEED):
    """Two harmonics of a 50-step period plus Gaussian noise."""
    rng = np.random.default_rng(seed)
    x = np.arange(n_points) * spacing
    z = (
        1.0 * np.cos(2.0 * math.pi * x / TURNED_PERIOD + 0.7)
        + 0.35 * np.cos(4.0 * math.pi * x / TURNED_PERIOD + 2.1)
        + 0.15 * rng.standard_normal(n_points)
    )
    return Profile(z, spacing)


def turned_profile_field(n_points=2000, spacing=1.0, seed=TURNED_PROFILE_SEED):
    profile = turned_profile(n_points, spacing, seed)
    grid = Grid((n_points,), (spacing,))
    meta = {
        "description": "synthetic turned profile: two harmonics (period 50 steps) plus noise",
        "seed": seed,
        "period": TURNED_PERIOD,
    }
    return SurfaceField(grid, profile.heights, kind="noisy", meta=meta)


def turned_surface_field(nx=128, ny=32, spacing=(1.0, 1.0), seed=TURNED_SURFACE_SEED):
    """Periodic along x, nearly constant along y, with mild measurement noise."""
    rng = np.random.default_rng(seed)
    x = np.arange(nx) * spacing[0]
    profile = 1.0 * np.cos(2.0 * math.pi * x / TURNED_PERIOD + 0.4) + 0.3 * np.cos(
        4.0 * math.pi * x / TURNED_PERIOD + 1.3
    )
    slow = 1.0 + 0.02 * np.cos(2.0 * math.pi * np.arange(ny) / ny)
    heights = profile[:, None] * slow[None, :] + 0.05 * rng.standard_normal((nx, ny))
    grid = Grid((nx, ny), spacing)
    meta = {
        "description": "synthetic turned surface: periodic along x, near-constant along y",
        "seed": seed,
        "period": TURNED_PERIOD,
    }
    return SurfaceField(grid, heights.reshape(-1), kind="noisy", meta=meta)
