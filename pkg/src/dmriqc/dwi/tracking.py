"""Deterministic first-eigenvector streamline tracking.

Bidirectional Euler integration of the principal diffusion direction with
trilinear interpolation of both the direction field and FA. At every step
the interpolated direction's sign is chosen to keep moving the same way.
Tracking stops on mask exit, FA below threshold, or a turn sharper than
the angle limit. Step length is constant, so consecutive points are
exactly one step apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SeedOutsideMask
from . import kernels
from .scalars import ScalarMaps

MAX_STEPS = 10_000


@dataclass(frozen=True)
class Streamline:
    points: np.ndarray  # (n, 3) positions in mm

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"bad streamline shape {pts.shape}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def length_mm(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))


def track_streamlines(
    maps: ScalarMaps,
    seeds: np.ndarray,
    voxel_size: tuple[float, float, float],
    step_mm: float = 1.0,
    fa_stop: float = 0.2,
    angle_stop_deg: float = 45.0,
    max_steps: int = MAX_STEPS,
) -> list[Streamline]:
    """Track one streamline per seed. Seeds are mm positions inside the mask.

    Raises SeedOutsideMask if any seed's nearest voxel is outside the mask
    or the grid. Seeds in low-FA voxels yield single-point streamlines.
    """
    seeds = np.atleast_2d(np.asarray(seeds, dtype=np.float64))
    if seeds.ndim != 2 or seeds.shape[1] != 3:
        raise ValueError(f"bad seeds shape {seeds.shape}")
    dims = np.array(maps.fa.shape)
    vs = np.asarray(voxel_size, dtype=np.float64)
    idx = seeds / vs
    nearest = np.floor(idx + 0.5).astype(int)
    out_of_grid = np.any((idx < 0) | (idx > dims - 1), axis=1)
    if np.any(out_of_grid):
        bad = seeds[out_of_grid][0]
        raise SeedOutsideMask(f"seed {tuple(bad)} is outside the volume")
    unmasked = ~maps.mask[nearest[:, 0], nearest[:, 1], nearest[:, 2]]
    if np.any(unmasked):
        bad = seeds[unmasked][0]
        raise SeedOutsideMask(f"seed {tuple(bad)} is outside the mask")

    cos_stop = math.cos(math.radians(angle_stop_deg))
    tracked = kernels.track_all(
        maps.principal_dir,
        maps.fa,
        maps.mask.astype(np.uint8),
        seeds,
        tuple(float(v) for v in vs),
        float(step_mm),
        float(fa_stop),
        cos_stop,
        int(max_steps),
    )
    return [Streamline(p) for p in tracked]


def seed_lattice(
    maps: ScalarMaps,
    voxel_size: tuple[float, float, float],
    fa_min: float = 0.25,
    stride: int = 2,
) -> np.ndarray:
    """Deterministic seed grid: every stride-th voxel with FA above fa_min.

    Returns mm positions in C index order; identical input maps give an
    identical lattice.
    """
    eligible = maps.mask & (maps.fa >= fa_min)
    coords = np.argwhere(eligible)
    keep = np.all(coords % stride == 0, axis=1)
    return coords[keep].astype(np.float64) * np.asarray(voxel_size, dtype=np.float64)


def mean_length_mm(streamlines: list[Streamline]) -> float:
    if not streamlines:
        return 0.0
    return float(np.mean([s.length_mm for s in streamlines]))
