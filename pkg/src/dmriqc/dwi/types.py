"""Core diffusion data containers.

Arrays are float64 throughout; the 4D series axis order is (X, Y, Z, N)
with one trailing entry per acquired volume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import QcError

# |g| tolerance for nonzero b-vectors, per the acquisition convention that
# direction vectors are unit normalized.
UNIT_NORM_TOL = 1e-3

# b-values at or below this count as non-diffusion-weighted. Scanners often
# report small nonzero values for b0 volumes.
B0_MAX = 50.0


@dataclass(frozen=True)
class GradientTable:
    """Per-volume b-values (s/mm^2) and unit gradient directions."""

    bvals: np.ndarray  # (N,)
    bvecs: np.ndarray  # (N, 3)

    def __post_init__(self):
        bvals = np.asarray(self.bvals, dtype=np.float64)
        bvecs = np.asarray(self.bvecs, dtype=np.float64)
        object.__setattr__(self, "bvals", bvals)
        object.__setattr__(self, "bvecs", bvecs)
        if bvecs.ndim != 2 or bvecs.shape[1] != 3 or bvals.ndim != 1:
            raise QcError(f"bad gradient shapes {bvals.shape} / {bvecs.shape}")
        if len(bvals) != len(bvecs):
            raise QcError("bvals and bvecs length mismatch")
        if np.any(bvals < 0):
            raise QcError("negative b-value")
        norms = np.linalg.norm(bvecs, axis=1)
        weighted = bvals > B0_MAX
        if np.any(np.abs(norms[weighted] - 1.0) > UNIT_NORM_TOL):
            raise QcError("non-unit gradient direction for b > 0")

    def __len__(self) -> int:
        return len(self.bvals)

    @property
    def b0_mask(self) -> np.ndarray:
        return self.bvals <= B0_MAX

    def shells(self, tol: float = 50.0) -> list[tuple[float, np.ndarray]]:
        """Group volumes into b-shells, merging b-values within *tol*.

        Returns (representative bval, volume index array) pairs sorted by b.
        """
        order = np.argsort(self.bvals, kind="stable")
        groups: list[list[int]] = []
        for idx in order:
            if groups and self.bvals[idx] - self.bvals[groups[-1][0]] <= tol:
                groups[-1].append(int(idx))
            else:
                groups.append([int(idx)])
        return [
            (float(np.median(self.bvals[g])), np.array(sorted(g), dtype=int)) for g in groups
        ]


@dataclass(frozen=True)
class DwiSeries:
    """4D diffusion-weighted series with its gradient table."""

    voxels: np.ndarray  # (X, Y, Z, N)
    voxel_size: tuple[float, float, float]
    gradients: GradientTable

    def __post_init__(self):
        vox = np.asarray(self.voxels, dtype=np.float64)
        object.__setattr__(self, "voxels", vox)
        object.__setattr__(self, "voxel_size", tuple(float(v) for v in self.voxel_size))
        if vox.ndim != 4:
            raise QcError(f"series must be 4D, got {vox.ndim}D")
        if any(d < 1 for d in vox.shape):
            raise QcError(f"bad series dims {vox.shape}")
        if vox.shape[3] != len(self.gradients):
            raise QcError(
                f"volume count {vox.shape[3]} != gradient count {len(self.gradients)}"
            )
        if any(v <= 0 for v in self.voxel_size):
            raise QcError(f"voxel sizes must be positive, got {self.voxel_size}")
        if not np.all(np.isfinite(vox)):
            raise QcError("series contains non-finite intensities")

    @property
    def shape3(self) -> tuple[int, int, int]:
        return self.voxels.shape[:3]

    def mean_b0(self) -> np.ndarray:
        b0 = self.gradients.b0_mask
        if not np.any(b0):
            raise QcError("series has no b0 volume")
        return self.voxels[..., b0].mean(axis=3)
