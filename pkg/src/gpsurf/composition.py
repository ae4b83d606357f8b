"""Honed surfaces as pointwise minima of independently sampled ground surfaces.

A one-step honed surface is the node-wise minimum of two ground surfaces
whose groove angles mirror each other; a multi-step surface is the minimum
over the per-step results.  Composition acts on latent fields; observation
noise, which models the measurement, is added afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gpsurf.kernels import ExponentialRotatedAcvf
from gpsurf.sampling import DEFAULT_POINT_CAP, SurfaceField, sample_latent

#: Seed offsets so one master seed reproduces a whole multi-step surface
#: without colliding with the observation-noise stream (master + 1).
STEP_SEED_BASE = 101


@dataclass(frozen=True)
class HoningStepSpec:
    """Exponential-kernel parameters and seeds for one honing step.

    Each step realizes the ground surface twice, at +angle and -angle;
    ``angle`` must be nonzero so the mirrored grooves differ.  Honing is
    defined for the exponential family only; other kernels are rejected at
    the configuration layer.
    """

    variance: float
    lengthscale_a: float
    lengthscale_b: float
    angle: float
    seed_pos: int
    seed_neg: int

    def __post_init__(self):
        if self.angle == 0.0:
            raise ValueError("honing step angle must be nonzero (mirrored grooves must differ)")
        if not (-math.pi < self.angle < math.pi):
            # the open interval keeps the mirrored angle representable too
            raise ValueError("honing step angle must lie in (-pi, pi) and be nonzero")

    @classmethod
    def from_master_seed(cls, master_seed, index, variance, lengthscale_a, lengthscale_b, angle):
        """Derive the two realization seeds from a master seed by fixed offsets."""
        base = int(master_seed) + STEP_SEED_BASE + 2 * int(index)
        return cls(
            variance=variance,
            lengthscale_a=lengthscale_a,
            lengthscale_b=lengthscale_b,
            angle=angle,
            seed_pos=base,
            seed_neg=base + 1,
        )

    def kernel(self, sign=1):
        return ExponentialRotatedAcvf(
            variance=self.variance,
            lengthscale_a=self.lengthscale_a,
            lengthscale_b=self.lengthscale_b,
            angle=self.angle if sign > 0 else -self.angle,
        )


def min_compose(fields):
    """Node-wise minimum of two or more fields on the identical grid.

    Commutative and associative: any input permutation gives bitwise-equal
    heights.
    """
    fields = list(fields)
    if len(fields) < 2:
        raise ValueError("min_compose needs at least two fields")
    grid = fields[0].grid
    kind = fields[0].kind
    for other in fields[1:]:
        if other.grid != grid:
            raise ValueError("all fields must share the identical grid")
        if other.kind != kind:
            raise ValueError("all fields must share the same kind")
    heights = np.minimum.reduce([f.heights for f in fields])
    meta = {"composed_from": [dict(f.meta) for f in fields]}
    return SurfaceField(grid, heights, kind=kind, meta=meta)


def simulate_honed(grid, steps, max_points=DEFAULT_POINT_CAP, keep_intermediates=False):
    """Simulate a multi-step honed surface on ``grid``.

    Per step, the +angle and -angle ground surfaces are sampled with the
    step's seeds and min-composed; the per-step results are then min-composed
    into the final surface.  Deterministic under fixed seeds.

    With ``keep_intermediates`` the return value is ``(surface, one_steps,
    realizations)`` where ``realizations`` holds the per-step (+, -) pairs.
    """
    steps = list(steps)
    if len(steps) < 1:
        raise ValueError("at least one honing step is required")
    one_steps = []
    realizations = []
    for step in steps:
        pos = sample_latent(grid, step.kernel(+1), step.seed_pos, 1, max_points)[0]
        neg = sample_latent(grid, step.kernel(-1), step.seed_neg, 1, max_points)[0]
        realizations.append((pos, neg))
        one_steps.append(min_compose([pos, neg]))
    surface = one_steps[0] if len(one_steps) == 1 else min_compose(one_steps)
    if keep_intermediates:
        return surface, one_steps, realizations
    return surface
