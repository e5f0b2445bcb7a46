"""Mono-exponential diffusion signal model.

The attenuation at a voxel follows S = S0 * exp(-b * g' D g) where D is the
symmetric diffusion tensor and g the unit gradient direction, so the zero
b-value signal is S0 exactly and flipping g leaves S unchanged.

Tensors are handled in two layouts: a compact 6-vector of unique components
ordered (Dxx, Dyy, Dzz, Dxy, Dxz, Dyz), and the full symmetric 3x3 matrix.
"""

from __future__ import annotations

import numpy as np

TENSOR_COMPONENTS = ("Dxx", "Dyy", "Dzz", "Dxy", "Dxz", "Dyz")


def tensor_to_matrix(six: np.ndarray) -> np.ndarray:
    """(..., 6) component vectors to (..., 3, 3) symmetric matrices."""
    six = np.asarray(six, dtype=np.float64)
    m = np.empty(six.shape[:-1] + (3, 3), dtype=np.float64)
    dxx, dyy, dzz, dxy, dxz, dyz = (six[..., i] for i in range(6))
    m[..., 0, 0] = dxx
    m[..., 1, 1] = dyy
    m[..., 2, 2] = dzz
    m[..., 0, 1] = m[..., 1, 0] = dxy
    m[..., 0, 2] = m[..., 2, 0] = dxz
    m[..., 1, 2] = m[..., 2, 1] = dyz
    return m


def matrix_to_tensor(m: np.ndarray) -> np.ndarray:
    """(..., 3, 3) symmetric matrices to (..., 6) component vectors."""
    m = np.asarray(m, dtype=np.float64)
    return np.stack(
        [m[..., 0, 0], m[..., 1, 1], m[..., 2, 2], m[..., 0, 1], m[..., 0, 2], m[..., 1, 2]],
        axis=-1,
    )


def quadratic_form(six: np.ndarray, g: np.ndarray) -> np.ndarray:
    """g' D g for component vectors (..., 6) and directions (..., 3)."""
    six = np.asarray(six, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    gx, gy, gz = g[..., 0], g[..., 1], g[..., 2]
    return (
        six[..., 0] * gx * gx
        + six[..., 1] * gy * gy
        + six[..., 2] * gz * gz
        + 2.0 * six[..., 3] * gx * gy
        + 2.0 * six[..., 4] * gx * gz
        + 2.0 * six[..., 5] * gy * gz
    )


def predict_signal(s0, b, g, tensor) -> np.ndarray:
    """Signal for weighting b along direction g given a tensor.

    *tensor* may be a 6-vector, a 3x3 matrix, or arrays of either.
    Broadcasts over all arguments; b = 0 returns s0 exactly.
    """
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.shape[-1] == 3 and tensor.ndim >= 2 and tensor.shape[-2] == 3:
        tensor = matrix_to_tensor(tensor)
    b = np.asarray(b, dtype=np.float64)
    s0 = np.asarray(s0, dtype=np.float64)
    return s0 * np.exp(-b * quadratic_form(tensor, g))


def isotropic_tensor(diffusivity: float) -> np.ndarray:
    return np.array([diffusivity, diffusivity, diffusivity, 0.0, 0.0, 0.0])


def tensor_from_eigen(eigenvalues, principal: np.ndarray) -> np.ndarray:
    """Axially symmetric tensor: lambda1 along *principal*, lambda2=lambda3 across.

    eigenvalues is (l1, l23) or (l1, l2, l3) with l2 == l3.
    """
    vals = tuple(float(v) for v in np.atleast_1d(eigenvalues))
    if len(vals) == 2:
        l1, l23 = vals
    else:
        l1, l23 = vals[0], vals[1]
    e = np.asarray(principal, dtype=np.float64)
    e = e / np.linalg.norm(e)
    m = l23 * np.eye(3) + (l1 - l23) * np.outer(e, e)
    return matrix_to_tensor(m)
