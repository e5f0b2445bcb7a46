"""Standardized review panels.

All five panel types are pure functions of their inputs and a RenderSpec,
returning (H, W, 3) uint8 arrays; the encoder in .image turns those into
byte-stable PNGs. Slice display convention: columns follow the first
in-plane axis, rows follow the second with its origin at the bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dwi.scalars import ScalarMaps
from ..dwi.tensor import TensorFit
from ..errors import EmptyVolume, NotSquare, ShapeMismatch, SliceOutOfRange
from .image import draw_text, heat_colormap, label_color, scale_nearest, text_width

PLANES = ("axial", "coronal", "sagittal")
_PLANE_AXIS = {"axial": 2, "coronal": 1, "sagittal": 0}


@dataclass(frozen=True)
class RenderSpec:
    plane: str = "axial"
    slices: tuple[int, ...] | None = None  # None = auto, evenly spaced
    n_slices: int = 9
    window_percentiles: tuple[float, float] = (2.0, 98.0)
    overlay_opacity: float = 0.4
    scale: int = 4  # output pixels per voxel

    def __post_init__(self):
        if self.plane not in PLANES:
            raise ValueError(f"plane must be one of {PLANES}")
        if not (0.0 <= self.overlay_opacity <= 1.0):
            raise ValueError("overlay opacity must be in [0, 1]")
        if self.scale < 1 or self.n_slices < 1:
            raise ValueError("scale and n_slices must be positive")


def _slice_indices(volume: np.ndarray, spec: RenderSpec) -> list[int]:
    axis = _PLANE_AXIS[spec.plane]
    n = volume.shape[axis]
    if spec.slices is not None:
        for k in spec.slices:
            if not (0 <= k < n):
                raise SliceOutOfRange(f"slice {k} outside 0..{n - 1} ({spec.plane})")
        return list(spec.slices)
    count = min(spec.n_slices, n)
    # Evenly spaced interior slices, skipping the very edges when possible.
    return [int(round((i + 1) * n / (count + 1))) for i in range(count)]


def _extract_slice(volume: np.ndarray, plane: str, k: int) -> np.ndarray:
    if plane == "axial":
        sl = volume[:, :, k]
    elif plane == "coronal":
        sl = volume[:, k, :]
    else:
        sl = volume[k, :, :]
    return sl.T[::-1, :]  # rows = second axis, origin at bottom


def _window(volume: np.ndarray, spec: RenderSpec) -> tuple[float, float]:
    lo, hi = np.percentile(volume, spec.window_percentiles)
    return float(lo), float(hi)


def _to_gray(sl: np.ndarray, lo: float, hi: float) -> np.ndarray:
    if hi <= lo:
        return np.full(sl.shape, 128, dtype=np.uint8)
    scaled = np.clip((sl - lo) / (hi - lo), 0.0, 1.0)
    return (scaled * 255.0).round().astype(np.uint8)


def _grid_columns(n: int) -> int:
    """Smallest divisor of n at or above sqrt(n): a grid with no empty cells."""
    start = math.ceil(math.sqrt(n))
    for cols in range(start, n + 1):
        if n % cols == 0:
            return cols
    return n


def _montage_gray(volume: np.ndarray, spec: RenderSpec) -> np.ndarray:
    """(H, W) uint8 montage of the selected slices."""
    idx = _slice_indices(volume, spec)
    lo, hi = _window(volume, spec)
    panels = [_to_gray(_extract_slice(volume, spec.plane, k), lo, hi) for k in idx]
    cols = _grid_columns(len(panels))
    rows = len(panels) // cols
    ph, pw = panels[0].shape
    grid = np.zeros((rows * ph, cols * pw), dtype=np.uint8)
    for i, p in enumerate(panels):
        r, c = divmod(i, cols)
        grid[r * ph : (r + 1) * ph, c * pw : (c + 1) * pw] = p
    return scale_nearest(grid, spec.scale)


def render_montage(volume: np.ndarray, spec: RenderSpec = RenderSpec()) -> np.ndarray:
    """Grayscale slice montage, row-major."""
    volume = np.asarray(volume, dtype=np.float64)
    if volume.ndim != 3 or volume.size == 0:
        raise EmptyVolume(f"montage needs a non-empty 3D volume, got {volume.shape}")
    gray = _montage_gray(volume, spec)
    return np.repeat(gray[:, :, None], 3, axis=2)


def render_label_overlay(
    base: np.ndarray, labels: np.ndarray, spec: RenderSpec = RenderSpec()
) -> np.ndarray:
    """Base montage with hash-colored labels alpha-blended on top."""
    base = np.asarray(base, dtype=np.float64)
    labels = np.asarray(labels)
    if base.ndim != 3 or base.size == 0:
        raise EmptyVolume(f"overlay needs a non-empty 3D volume, got {base.shape}")
    if labels.shape != base.shape:
        raise ShapeMismatch(f"labels {labels.shape} != base {base.shape}")

    out = render_montage(base, spec).astype(np.float64)
    idx = _slice_indices(base, spec)
    label_panels = [_extract_slice(labels, spec.plane, k) for k in idx]
    cols = _grid_columns(len(label_panels))
    ph, pw = label_panels[0].shape
    lgrid = np.zeros(((len(label_panels) // cols) * ph, cols * pw), dtype=np.int64)
    for i, p in enumerate(label_panels):
        r, c = divmod(i, cols)
        lgrid[r * ph : (r + 1) * ph, c * pw : (c + 1) * pw] = p.astype(np.int64)
    lgrid = scale_nearest(lgrid, spec.scale)

    op = spec.overlay_opacity
    for label_id in np.unique(lgrid):
        if label_id == 0:
            continue
        colour = np.array(label_color(int(label_id)), dtype=np.float64)
        where = lgrid == label_id
        out[where] = (1.0 - op) * out[where] + op * colour
    return out.round().astype(np.uint8)


def glyph_params(six: np.ndarray, plane: str) -> tuple[float, float, float]:
    """In-plane ellipse (angle_rad, major, minor) for one tensor.

    The tensor's 2x2 restriction to the view plane is eigen-decomposed;
    the angle is the major axis direction in (first axis, second axis)
    coordinates.
    """
    from ..dwi.signal import tensor_to_matrix

    m = tensor_to_matrix(six)
    ax1, ax2 = {"axial": (0, 1), "coronal": (0, 2), "sagittal": (1, 2)}[plane]
    a = m[ax1, ax1]
    b = m[ax1, ax2]
    c = m[ax2, ax2]
    angle = 0.5 * math.atan2(2.0 * b, a - c)
    mean = (a + c) / 2.0
    diff = math.hypot((a - c) / 2.0, b)
    return angle, max(mean + diff, 0.0), max(mean - diff, 0.0)


def render_tensor_glyphs(
    fit: TensorFit,
    maps: ScalarMaps,
    plane: str = "axial",
    slice_index: int | None = None,
    cell_px: int = 12,
    max_grid: int = 64,
) -> np.ndarray:
    """Ellipse-per-voxel glyph panel for one slice.

    Ellipses are the in-plane tensor projections, colored by the principal
    direction convention (|x|=red, |y|=green, |z|=blue) with brightness
    proportional to FA.
    """
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {PLANES}")
    axis = _PLANE_AXIS[plane]
    n = fit.shape3[axis]
    if slice_index is None:
        slice_index = n // 2
    if not (0 <= slice_index < n):
        raise SliceOutOfRange(f"slice {slice_index} outside 0..{n - 1} ({plane})")

    ax1, ax2 = [i for i in range(3) if i != axis]
    n1, n2 = fit.shape3[ax1], fit.shape3[ax2]
    step = max(1, math.ceil(max(n1, n2) / max_grid))
    g1 = list(range(0, n1, step))
    g2 = list(range(0, n2, step))

    height = len(g2) * cell_px
    width = len(g1) * cell_px
    img = np.zeros((height, width, 3), dtype=np.uint8)

    # Normalize ellipse size by the largest in-slice eigenvalue.
    def voxel_index(i1: int, i2: int) -> tuple[int, int, int]:
        idx = [0, 0, 0]
        idx[axis] = slice_index
        idx[ax1] = i1
        idx[ax2] = i2
        return tuple(idx)

    lam_max = 0.0
    for i1 in g1:
        for i2 in g2:
            v = voxel_index(i1, i2)
            if maps.mask[v]:
                lam_max = max(lam_max, float(maps.eigenvalues[v][0]))
    if lam_max <= 0:
        lam_max = 1.0

    half = cell_px / 2.0
    yy, xx = np.mgrid[0:cell_px, 0:cell_px]
    xc = xx - half + 0.5
    yc = yy - half + 0.5
    for col, i1 in enumerate(g1):
        for row_rev, i2 in enumerate(g2):
            v = voxel_index(i1, i2)
            if not maps.mask[v]:
                continue
            angle, lam_a, lam_b = glyph_params(fit.tensors[v], plane)
            if lam_a <= 0:
                continue
            a_px = max((half - 1.0) * math.sqrt(lam_a / lam_max), 0.8)
            b_px = max((half - 1.0) * math.sqrt(max(lam_b, 0.0) / lam_max), 0.8)
            # Rows grow downward while the second axis grows upward.
            ca, sa = math.cos(angle), math.sin(angle)
            u = xc * ca + (-yc) * sa
            w = -xc * sa + (-yc) * ca
            inside = (u / a_px) ** 2 + (w / b_px) ** 2 <= 1.0
            fa = float(maps.fa[v])
            colour = np.abs(maps.principal_dir[v]) * fa * 255.0
            row = (len(g2) - 1 - row_rev) * cell_px
            cell = img[row : row + cell_px, col * cell_px : (col + 1) * cell_px]
            cell[inside] = colour.round().astype(np.uint8)
    return img


def render_comparison(
    left: np.ndarray,
    right: np.ndarray,
    captions: tuple[str, str] = ("", ""),
    gutter: int = 4,
) -> np.ndarray:
    """Side-by-side panel with a caption strip under each image."""
    left = np.asarray(left, dtype=np.uint8)
    right = np.asarray(right, dtype=np.uint8)
    if left.ndim != 3 or right.ndim != 3:
        raise ValueError("comparison expects rendered RGB images")
    if right.shape[0] != left.shape[0]:
        # Nearest-neighbor resample the right image to the left's height.
        h = left.shape[0]
        rows = (np.arange(h) * right.shape[0] / h).astype(int)
        cols_n = max(1, int(round(right.shape[1] * h / right.shape[0])))
        cols = (np.arange(cols_n) * right.shape[1] / cols_n).astype(int)
        right = right[rows][:, cols]

    caption_h = 16
    h = left.shape[0] + caption_h
    w = left.shape[1] + gutter + right.shape[1]
    out = np.zeros((h, w, 3), dtype=np.uint8)
    out[: left.shape[0], : left.shape[1]] = left
    out[: right.shape[0], left.shape[1] + gutter :] = right
    for text, x0, width in (
        (captions[0], 0, left.shape[1]),
        (captions[1], left.shape[1] + gutter, right.shape[1]),
    ):
        if text:
            col = x0 + max((width - text_width(text)) // 2, 0)
            draw_text(out, text, left.shape[0] + 4, col)
    return out


def render_connectome(matrix: np.ndarray, weighting: str = "nos") -> np.ndarray:
    """Heatmap of a connectome matrix: log(1+x) for NOS, linear [0,1] for FA."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
        raise NotSquare(f"connectome matrix is {m.shape}")
    if weighting == "nos":
        top = np.log1p(m).max()
        norm = np.log1p(np.maximum(m, 0.0)) / top if top > 0 else np.zeros_like(m)
    elif weighting == "fa":
        norm = np.clip(m, 0.0, 1.0)
    else:
        raise ValueError(f"weighting must be 'nos' or 'fa', got {weighting!r}")
    rgb = heat_colormap(norm)
    return scale_nearest(rgb, max(1, math.ceil(256 / m.shape[0])))
