"""Log-linear diffusion tensor fitting.

Per voxel, ordinary least squares on ln(S) with the design row

    [1, -b*gx^2, -b*gy^2, -b*gz^2, -2b*gx*gy, -2b*gx*gz, -2b*gy*gz]

solving for [ln S0, Dxx, Dyy, Dzz, Dxy, Dxz, Dyz]. Only volumes with
b <= b_max enter the fit. Non-positive samples are floored at a small
fraction of the voxel's b0 intensity and excluded from the solve by
zero weight; their voxels fall back to a per-voxel weighted solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientDirections, SingularDesign
from .types import B0_MAX, DwiSeries

DEFAULT_B_MAX = 1500.0
NONPOS_FLOOR_FRACTION = 1e-6


def design_matrix(bvals: np.ndarray, bvecs: np.ndarray) -> np.ndarray:
    b = np.asarray(bvals, dtype=np.float64)
    g = np.asarray(bvecs, dtype=np.float64)
    gx, gy, gz = g[:, 0], g[:, 1], g[:, 2]
    return np.column_stack(
        [
            np.ones_like(b),
            -b * gx * gx,
            -b * gy * gy,
            -b * gz * gz,
            -2.0 * b * gx * gy,
            -2.0 * b * gx * gz,
            -2.0 * b * gy * gz,
        ]
    )


@dataclass
class TensorFit:
    """Voxelwise fit results on the series grid."""

    tensors: np.ndarray  # (X, Y, Z, 6), components (Dxx,Dyy,Dzz,Dxy,Dxz,Dyz)
    s0: np.ndarray  # (X, Y, Z)
    rss: np.ndarray  # (X, Y, Z) residual sum of squares in log-signal space
    mask: np.ndarray  # voxels actually fitted
    b_max: float
    volumes_used: np.ndarray  # indices of the fitted volumes
    floored_samples: int  # count of non-positive samples excluded

    @property
    def shape3(self) -> tuple[int, int, int]:
        return self.s0.shape


def _check_scheme(bvals: np.ndarray, bvecs: np.ndarray, b_max: float) -> np.ndarray:
    used = np.flatnonzero(bvals <= b_max)
    if len(used) < 7:
        raise InsufficientDirections(
            f"{len(used)} volumes with b <= {b_max:g}; need at least 7"
        )
    b_used = bvals[used]
    n_b0 = int(np.sum(b_used <= B0_MAX))
    if n_b0 < 1:
        raise InsufficientDirections(f"no b0 volume below b <= {B0_MAX:g}")
    if len(used) - n_b0 < 6:
        raise InsufficientDirections(
            f"only {len(used) - n_b0} diffusion-weighted volumes with b <= {b_max:g}; need 6"
        )
    design = design_matrix(b_used, bvecs[used])
    if np.linalg.matrix_rank(design) < 7:
        raise SingularDesign("gradient scheme is collinear; tensor is not identifiable")
    return used


def fit_tensor(series: DwiSeries, mask: np.ndarray | None = None, b_max: float = DEFAULT_B_MAX) -> TensorFit:
    """Fit a tensor at every masked voxel.

    mask=None fits every voxel. Raises InsufficientDirections or
    SingularDesign when the acquisition cannot support the fit.
    """
    bvals = series.gradients.bvals
    bvecs = series.gradients.bvecs
    used = _check_scheme(bvals, bvecs, b_max)
    design = design_matrix(bvals[used], bvecs[used])

    shape3 = series.shape3
    if mask is None:
        mask = np.ones(shape3, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != shape3:
        raise ValueError(f"mask shape {mask.shape} != volume shape {shape3}")

    data = series.voxels[..., used][mask]  # (V, N)
    n_vox = data.shape[0]
    coeffs = np.zeros((n_vox, 7), dtype=np.float64)
    rss_v = np.zeros(n_vox, dtype=np.float64)
    floored = 0

    if n_vox:
        b0_cols = bvals[used] <= B0_MAX
        ref = data[:, b0_cols].mean(axis=1)  # voxel b0 intensity
        floor = NONPOS_FLOOR_FRACTION * np.maximum(ref, 0.0)[:, None]
        bad = data <= 0.0
        floored = int(bad.sum())
        safe = np.where(bad, np.maximum(floor, np.finfo(np.float64).tiny), data)
        log_s = np.log(safe)

        clean = ~bad.any(axis=1)
        if clean.any():
            # One pseudoinverse serves every voxel with a full weight row.
            pinv = np.linalg.pinv(design)
            sol = log_s[clean] @ pinv.T
            coeffs[clean] = sol
            resid = log_s[clean] - sol @ design.T
            rss_v[clean] = np.einsum("ij,ij->i", resid, resid)
        for i in np.flatnonzero(~clean):
            w = ~bad[i]
            if w.sum() >= 7 and np.linalg.matrix_rank(design[w]) == 7:
                sol, *_ = np.linalg.lstsq(design[w], log_s[i, w], rcond=None)
            else:
                # Too corrupt to identify: fall back to the floored full row.
                sol, *_ = np.linalg.lstsq(design, log_s[i], rcond=None)
                w = np.ones(len(used), dtype=bool)
            coeffs[i] = sol
            r = log_s[i, w] - design[w] @ sol
            rss_v[i] = float(r @ r)

    tensors = np.zeros(shape3 + (6,), dtype=np.float64)
    s0 = np.zeros(shape3, dtype=np.float64)
    rss = np.zeros(shape3, dtype=np.float64)
    tensors[mask] = coeffs[:, 1:]
    s0[mask] = np.exp(coeffs[:, 0])
    rss[mask] = rss_v
    return TensorFit(
        tensors=tensors,
        s0=s0,
        rss=rss,
        mask=mask,
        b_max=b_max,
        volumes_used=used,
        floored_samples=floored,
    )
