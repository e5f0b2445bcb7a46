"""Synthetic diffusion phantoms with known ground-truth tensors.

Signals are generated voxelwise from the mono-exponential model, so a
noiseless phantom refits to its ground truth exactly (up to float
rounding). Geometries:

    straight    axis-aligned cylindrical tract along y
    u-arc       semicircular tube in an axial plane (curved geometry is
                what makes gradient sign flips detectable)
    isotropic   background tissue only

Tissue magnitudes are ordinary literature-scale values and are fields of
PhantomSpec: anisotropic tract (1.7, 0.3, 0.3)e-3 mm^2/s along the local
tangent, isotropic background 0.7e-3, optional fluid ball 3.0e-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidSpec
from .directions import load_directions
from .signal import predict_signal, tensor_from_eigen
from .types import DwiSeries, GradientTable

GEOMETRIES = ("straight", "u-arc", "isotropic")


@dataclass(frozen=True)
class PhantomSpec:
    grid: tuple[int, int, int] = (32, 32, 32)
    voxel_size: tuple[float, float, float] = (1.0, 1.0, 1.0)
    shells: tuple[tuple[float, int], ...] = ((0.0, 1), (1000.0, 30))
    geometry: str = "u-arc"
    # Tilt of the arc plane out of the axial plane. A perfectly planar arc
    # is invariant under z sign flips (its tensors have no z coupling), so
    # a small tilt is what makes all three axes' sign flips detectable.
    tilt_deg: float = 15.0
    noise_sigma: float = 0.0
    seed: int = 0
    s0: float = 1000.0
    tract_eigenvalues: tuple[float, float] = (1.7e-3, 0.3e-3)
    background_diffusivity: float = 0.7e-3
    fluid_diffusivity: float = 3.0e-3
    include_fluid: bool = False

    def validate(self) -> None:
        if len(self.grid) != 3 or any(int(d) < 8 for d in self.grid):
            raise InvalidSpec(f"grid must be 3 dims of at least 8, got {self.grid}")
        if any(v <= 0 for v in self.voxel_size):
            raise InvalidSpec(f"voxel sizes must be positive, got {self.voxel_size}")
        if not self.shells:
            raise InvalidSpec("at least one shell required")
        for b, n in self.shells:
            if b < 0 or n < 1:
                raise InvalidSpec(f"bad shell ({b}, {n})")
        if self.geometry not in GEOMETRIES:
            raise InvalidSpec(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be non-negative")
        if self.s0 <= 0:
            raise InvalidSpec("s0 must be positive")


@dataclass
class PhantomData:
    series: DwiSeries
    tensors: np.ndarray  # ground truth, (X, Y, Z, 6)
    s0: np.ndarray  # (X, Y, Z)
    head_mask: np.ndarray
    tract_mask: np.ndarray
    spec: PhantomSpec
    geometry_info: dict = field(default_factory=dict)


def _grid_mm(spec: PhantomSpec):
    nx, ny, nz = spec.grid
    vx, vy, vz = spec.voxel_size
    x = np.arange(nx)[:, None, None] * vx
    y = np.arange(ny)[None, :, None] * vy
    z = np.arange(nz)[None, None, :] * vz
    return x, y, z


def _build_gradients(spec: PhantomSpec) -> GradientTable:
    bvals = []
    bvecs = []
    for b, n in spec.shells:
        if b <= 0:
            vecs = np.zeros((n, 3))
        else:
            vecs = load_directions(n)
        bvals.extend([b] * n)
        bvecs.append(vecs)
    return GradientTable(np.array(bvals, dtype=np.float64), np.vstack(bvecs))


def generate_phantom(spec: PhantomSpec) -> PhantomData:
    spec.validate()
    nx, ny, nz = spec.grid
    x, y, z = _grid_mm(spec)
    center = np.array([(nx - 1) / 2.0, (ny - 1) / 2.0, (nz - 1) / 2.0]) * np.asarray(
        spec.voxel_size
    )
    extent = min(n * v for n, v in zip(spec.grid, spec.voxel_size))
    head_r = 0.45 * extent
    rad2 = (x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2
    head = rad2 <= head_r**2

    tensors = np.zeros((nx, ny, nz, 6), dtype=np.float64)
    tensors[head] = tensor_from_eigen(
        (spec.background_diffusivity, spec.background_diffusivity), (1.0, 0.0, 0.0)
    )
    tract = np.zeros((nx, ny, nz), dtype=bool)
    info: dict = {"head_radius_mm": head_r}

    if spec.geometry == "straight":
        tube_r = 0.09 * extent
        half_len = 0.32 * extent
        in_tube = (x - center[0]) ** 2 + (z - center[2]) ** 2 <= tube_r**2
        tract = head & in_tube & (np.abs(y - center[1]) <= half_len)
        tensors[tract] = tensor_from_eigen(spec.tract_eigenvalues, (0.0, 1.0, 0.0))
        info.update(tract_length_mm=2.0 * half_len, tube_radius_mm=tube_r, axis="y")
    elif spec.geometry == "u-arc":
        arc_r = 0.30 * extent
        tube_r = 0.085 * extent
        arc_center = center - np.array([0.0, 0.12 * extent, 0.0])
        alpha = math.radians(spec.tilt_deg)
        # Arc plane basis: ex and u; n is the plane normal.
        u = np.array([0.0, math.cos(alpha), math.sin(alpha)])
        dx = np.broadcast_to(x - arc_center[0], spec.grid)
        dy = np.broadcast_to(y - arc_center[1], spec.grid)
        dz = np.broadcast_to(z - arc_center[2], spec.grid)
        a = dx
        b = dy * u[1] + dz * u[2]
        w = -dy * u[2] + dz * u[1]
        rho = np.sqrt(a**2 + b**2)
        d_arc2 = (rho - arc_r) ** 2 + w**2
        tract = head & (b >= 0) & (d_arc2 <= tube_r**2)
        theta = np.arctan2(b, a)
        tangent = (
            -np.sin(theta)[..., None] * np.array([1.0, 0.0, 0.0])
            + np.cos(theta)[..., None] * u
        )
        tt = tangent[tract]
        # Axially symmetric tensor along the local tangent.
        l1, l23 = spec.tract_eigenvalues
        outer = tt[:, :, None] * tt[:, None, :]
        mats = l23 * np.eye(3)[None] + (l1 - l23) * outer
        tensors[tract] = np.stack(
            [
                mats[:, 0, 0],
                mats[:, 1, 1],
                mats[:, 2, 2],
                mats[:, 0, 1],
                mats[:, 0, 2],
                mats[:, 1, 2],
            ],
            axis=-1,
        )
        info.update(
            arc_radius_mm=arc_r,
            tube_radius_mm=tube_r,
            arc_length_mm=math.pi * arc_r,
            arc_center_mm=tuple(arc_center),
            plane_z_mm=float(arc_center[2]),
            tilt_deg=spec.tilt_deg,
            plane_u=tuple(u),
        )
    # isotropic: nothing beyond background

    if spec.include_fluid:
        fluid_c = center + np.array([0.0, -0.22 * extent, 0.0])
        fluid = (x - fluid_c[0]) ** 2 + (y - fluid_c[1]) ** 2 + (
            z - fluid_c[2]
        ) ** 2 <= (0.08 * extent) ** 2
        fluid &= head & ~tract
        tensors[fluid] = tensor_from_eigen(
            (spec.fluid_diffusivity, spec.fluid_diffusivity), (1.0, 0.0, 0.0)
        )
        info["fluid_voxels"] = int(fluid.sum())

    gradients = _build_gradients(spec)
    s0_map = np.where(head, spec.s0, 0.0)
    signal = predict_signal(
        s0_map[..., None],
        gradients.bvals[None, None, None, :],
        gradients.bvecs[None, None, None, :, :],
        tensors[..., None, :],
    )
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        n1 = rng.normal(0.0, spec.noise_sigma, signal.shape)
        n2 = rng.normal(0.0, spec.noise_sigma, signal.shape)
        signal = np.sqrt((signal + n1) ** 2 + n2**2)

    series = DwiSeries(voxels=signal, voxel_size=spec.voxel_size, gradients=gradients)
    return PhantomData(
        series=series,
        tensors=tensors,
        s0=s0_map,
        head_mask=head,
        tract_mask=tract,
        spec=spec,
        geometry_info=info,
    )
