"""Per-slice reconstruction error between observed and model signal.

For every axial slice z and fitted volume n:

    chi2(z, n) = sum over masked voxels of (S_obs - S_pred)^2 / max(S_pred, eps)

Slice sums use math.fsum, which is exactly rounded and therefore
independent of voxel order and of any partitioning of the work.
Slices with no masked voxels are reported as absent, not as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal import predict_signal
from .tensor import TensorFit
from .types import DwiSeries

CHI_EPS = 1e-12


@dataclass
class SliceChiSquare:
    values: np.ndarray  # (Z, N_used), NaN where the slice has no masked voxels
    slice_mean: np.ndarray  # (Z,) mean over volumes, NaN for absent slices
    volumes_used: np.ndarray  # indices into the series' volume axis

    def present_slices(self) -> np.ndarray:
        return np.flatnonzero(~np.isnan(self.slice_mean))


def predict_series(fit: TensorFit, series: DwiSeries, volumes: np.ndarray) -> np.ndarray:
    """Model signal for the given volumes at every fitted voxel, 0 elsewhere."""
    bvals = series.gradients.bvals[volumes]
    bvecs = series.gradients.bvecs[volumes]
    out = np.zeros(fit.shape3 + (len(volumes),), dtype=np.float64)
    six = fit.tensors[fit.mask]
    s0 = fit.s0[fit.mask]
    if six.size:
        pred = predict_signal(s0[:, None], bvals[None, :], bvecs[None, :, :], six[:, None, :])
        out[fit.mask] = pred
    return out


def chi_square_slices(
    series: DwiSeries,
    fit: TensorFit,
    mask: np.ndarray | None = None,
    b_max: float | None = None,
) -> SliceChiSquare:
    """Slice x volume chi-square table for volumes with b <= b_max.

    The tensor map must be fitted on the same grid. b_max defaults to the
    fit's own threshold.
    """
    if fit.shape3 != series.shape3:
        raise ValueError(f"fit grid {fit.shape3} != series grid {series.shape3}")
    if b_max is None:
        b_max = fit.b_max
    volumes = np.flatnonzero(series.gradients.bvals <= b_max)
    if mask is None:
        mask = fit.mask
    mask = np.asarray(mask, dtype=bool) & fit.mask

    pred = predict_series(fit, series, volumes)
    obs = series.voxels[..., volumes]
    contrib = (obs - pred) ** 2 / np.maximum(pred, CHI_EPS)

    nz = series.shape3[2]
    values = np.full((nz, len(volumes)), np.nan, dtype=np.float64)
    for z in range(nz):
        m = mask[:, :, z]
        if not m.any():
            continue
        sl = contrib[:, :, z, :][m]  # (voxels, volumes)
        for j in range(len(volumes)):
            values[z, j] = math.fsum(sl[:, j].tolist())

    slice_mean = np.full(nz, np.nan, dtype=np.float64)
    present = ~np.all(np.isnan(values), axis=1)
    if present.any():
        slice_mean[present] = np.nanmean(values[present], axis=1)
    return SliceChiSquare(values=values, slice_mean=slice_mean, volumes_used=volumes)
