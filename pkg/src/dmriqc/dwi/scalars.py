"""Eigen-analysis of tensor maps and the derived FA / MD scalar maps.

Eigenvalues come from the closed-form trigonometric solution for symmetric
3x3 matrices (no iteration, fully vectorized, bit-stable). The tests check
it against an independent iterative solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import tensor_to_matrix
from .tensor import TensorFit


def sym3_eigenvalues(mats: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of symmetric (..., 3, 3) matrices."""
    a = np.asarray(mats, dtype=np.float64)
    a00, a11, a22 = a[..., 0, 0], a[..., 1, 1], a[..., 2, 2]
    a01, a02, a12 = a[..., 0, 1], a[..., 0, 2], a[..., 1, 2]

    p1 = a01 * a01 + a02 * a02 + a12 * a12
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = np.sqrt(np.maximum(p2 / 6.0, 0.0))

    vals = np.empty(a.shape[:-2] + (3,), dtype=np.float64)
    degenerate = p <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        b00 = (a00 - q) / p
        b11 = (a11 - q) / p
        b22 = (a22 - q) / p
        b01 = a01 / p
        b02 = a02 / p
        b12 = a12 / p
        det_b = (
            b00 * (b11 * b22 - b12 * b12)
            - b01 * (b01 * b22 - b12 * b02)
            + b02 * (b01 * b12 - b11 * b02)
        )
    r = np.clip(det_b / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    lam1 = q + 2.0 * p * np.cos(phi)
    lam3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    lam2 = 3.0 * q - lam1 - lam3
    vals[..., 0] = np.where(degenerate, q, lam1)
    vals[..., 1] = np.where(degenerate, q, lam2)
    vals[..., 2] = np.where(degenerate, q, lam3)
    return vals


def _principal_from_vals(a: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Unit eigenvector of the largest eigenvalue, sign-normalized.

    Cayley-Hamilton: columns of (A - l2 I)(A - l3 I) span the l1 eigenspace.
    Falls back to (A - l3 I) columns for planar spectra and to +x for the
    fully degenerate case; all choices are deterministic.
    """
    eye = np.eye(3)
    m1 = (a - vals[..., 1, None, None] * eye) @ (a - vals[..., 2, None, None] * eye)
    m2 = a - vals[..., 2, None, None] * eye

    scale = np.abs(vals).sum(axis=-1)
    tol1 = (scale**2) * 1e-12 + np.finfo(np.float64).tiny
    tol2 = scale * 1e-12 + np.finfo(np.float64).tiny

    def best_column(m, tol):
        norms = np.linalg.norm(m, axis=-2)  # (..., 3) column norms
        j = np.argmax(norms, axis=-1)
        col = np.take_along_axis(m, j[..., None, None], axis=-1)[..., 0]
        ok = np.take_along_axis(norms, j[..., None], axis=-1)[..., 0] > tol
        return col, ok

    col1, ok1 = best_column(m1, tol1)
    col2, ok2 = best_column(m2, tol2)
    fallback = np.zeros(a.shape[:-2] + (3,))
    fallback[..., 0] = 1.0
    vec = np.where(ok1[..., None], col1, np.where(ok2[..., None], col2, fallback))
    vec = vec / np.linalg.norm(vec, axis=-1, keepdims=True)

    # Largest-magnitude component positive, first index on ties.
    j = np.argmax(np.abs(vec), axis=-1)
    lead = np.take_along_axis(vec, j[..., None], axis=-1)[..., 0]
    return np.where(lead[..., None] < 0, -vec, vec)


def fa_md_from_eigenvalues(vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """FA clamped to [0, 1] (0 for an all-zero spectrum) and MD.

    Uses the pairwise-difference form of the dispersion term, which is
    algebraically identical to the deviation-from-mean form but returns
    an exact 0 for equal eigenvalues.
    """
    md = vals.mean(axis=-1)
    l1, l2, l3 = vals[..., 0], vals[..., 1], vals[..., 2]
    pairs = (l1 - l2) ** 2 + (l2 - l3) ** 2 + (l3 - l1) ** 2
    den = np.sqrt((vals * vals).sum(axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        fa = np.sqrt(0.5) * np.sqrt(pairs) / den
    fa = np.where(den > 0, fa, 0.0)
    return np.clip(fa, 0.0, 1.0), md


@dataclass
class ScalarMaps:
    fa: np.ndarray  # (X, Y, Z) in [0, 1]
    md: np.ndarray  # (X, Y, Z)
    principal_dir: np.ndarray  # (X, Y, Z, 3) unit vectors inside mask
    mask: np.ndarray  # (X, Y, Z) bool
    eigenvalues: np.ndarray  # (X, Y, Z, 3) descending
    dropped_voxels: int  # non-finite tensors removed from the mask
    negative_eigenvalue_voxels: int  # non-physical fits, kept but counted

    @property
    def voxel_count(self) -> int:
        return int(self.mask.sum())


def scalar_maps(fit: TensorFit, mask: np.ndarray | None = None) -> ScalarMaps:
    """FA / MD / principal direction maps from a tensor fit.

    Voxels with non-finite tensor components are dropped from the output
    mask and counted rather than raising.
    """
    if mask is None:
        mask = fit.mask
    mask = np.asarray(mask, dtype=bool) & fit.mask

    finite = np.all(np.isfinite(fit.tensors), axis=-1)
    dropped = int(np.sum(mask & ~finite))
    mask = mask & finite

    shape3 = fit.shape3
    fa = np.zeros(shape3, dtype=np.float64)
    md = np.zeros(shape3, dtype=np.float64)
    vals_full = np.zeros(shape3 + (3,), dtype=np.float64)
    principal = np.zeros(shape3 + (3,), dtype=np.float64)

    six = fit.tensors[mask]
    if six.size:
        mats = tensor_to_matrix(six)
        vals = sym3_eigenvalues(mats)
        vecs = _principal_from_vals(mats, vals)
        fa_v, md_v = fa_md_from_eigenvalues(vals)
        fa[mask] = fa_v
        md[mask] = md_v
        vals_full[mask] = vals
        principal[mask] = vecs
        negative = int(np.sum(np.any(vals < 0, axis=-1)))
    else:
        negative = 0

    return ScalarMaps(
        fa=fa,
        md=md,
        principal_dir=principal,
        mask=mask,
        eigenvalues=vals_full,
        dropped_voxels=dropped,
        negative_eigenvalue_voxels=negative,
    )
