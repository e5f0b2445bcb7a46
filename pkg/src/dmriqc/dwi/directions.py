"""Deterministic gradient direction tables.

Direction sets are spread over the hemisphere by minimizing an
electrostatic repulsion energy between antipodal point pairs, starting
from a golden-spiral layout. The optimization is fixed-seed and
fixed-iteration, so a given count always yields the same table.

Tables for commonly used counts are frozen under ``data/`` and loaded in
preference to regenerating, so shipped fixtures cannot drift if the
optimizer is ever touched.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_DATA_DIR = Path(__file__).resolve().parent / "data"


def _golden_hemisphere(n: int) -> np.ndarray:
    """Golden-spiral points on the upper hemisphere."""
    i = np.arange(n, dtype=np.float64)
    z = (i + 0.5) / n  # (0, 1]: keep away from the equator seam
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def repulsion_directions(n: int, iterations: int = 400, step: float = 5e-3) -> np.ndarray:
    """n unit vectors minimizing antipodal Coulomb energy.

    Gradient descent on sum over pairs of 1/|pi - pj| + 1/|pi + pj|,
    re-projected to the sphere each step.
    """
    if n < 1:
        raise ValueError("need at least one direction")
    pts = _golden_hemisphere(n)
    if n == 1:
        return pts
    for _ in range(iterations):
        force = np.zeros_like(pts)
        for sign in (1.0, -1.0):
            diff = pts[:, None, :] - sign * pts[None, :, :]  # (n, n, 3)
            dist2 = np.sum(diff * diff, axis=2)
            # Self-terms: i == j is either zero distance (sign +) or the
            # purely radial self-antipode push (sign -); drop both.
            np.fill_diagonal(dist2, np.inf)
            force += np.sum(diff / (dist2**1.5)[..., None], axis=1)
        pts = pts + step * force
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    # Canonical sign: largest-magnitude component positive.
    for k in range(n):
        j = int(np.argmax(np.abs(pts[k])))
        if pts[k, j] < 0:
            pts[k] = -pts[k]
    return pts


def load_directions(n: int) -> np.ndarray:
    """Direction table for *n* volumes: frozen file if shipped, else generated."""
    path = _DATA_DIR / f"dirs_{n:03d}.txt"
    if path.exists():
        table = np.loadtxt(path, dtype=np.float64).reshape(n, 3)
        return table
    return repulsion_directions(n)


def minimum_crossing_angle(dirs: np.ndarray) -> float:
    """Smallest pairwise angle in degrees, treating v and -v as identical."""
    dots = np.abs(dirs @ dirs.T)
    np.fill_diagonal(dots, -1.0)
    return float(np.degrees(np.arccos(np.clip(dots.max(), -1.0, 1.0))))
