"""Streamline tracking on phantoms, plus kernel-lane equivalence."""

import math

import numpy as np
import pytest

from dmriqc.dwi import (
    auto_mask,
    fit_tensor,
    mean_length_mm,
    scalar_maps,
    seed_lattice,
    track_streamlines,
)
from dmriqc.dwi.kernels import available_backends, get_track_all
from dmriqc.errors import SeedOutsideMask


def fitted_maps(ph):
    mask = auto_mask(ph.series)
    return scalar_maps(fit_tensor(ph.series, mask))


def test_straight_tract_length(straight_small):
    ph = straight_small
    maps = fitted_maps(ph)
    center = (np.array(ph.series.shape3) - 1) / 2.0 * np.array(ph.series.voxel_size)
    sl = track_streamlines(maps, center[None, :], ph.series.voxel_size)[0]
    expected = ph.geometry_info["tract_length_mm"]
    step = 1.0
    assert abs(sl.length_mm - expected) <= 2 * step + 1e-9
    # Constant step size between consecutive points.
    gaps = np.linalg.norm(np.diff(sl.points, axis=0), axis=1)
    assert np.abs(gaps - step).max() < 1e-6


def test_seed_in_isotropic_background_zero_length(straight_small):
    ph = straight_small
    maps = fitted_maps(ph)
    # A masked voxel far from the tract: FA ~ 0 there.
    seed = None
    for idx in np.argwhere(maps.mask):
        if not ph.tract_mask[tuple(idx)] and maps.fa[tuple(idx)] < 0.05:
            seed = idx * np.array(ph.series.voxel_size)
            break
    assert seed is not None
    sl = track_streamlines(maps, seed[None, :], ph.series.voxel_size)[0]
    assert len(sl) == 1
    assert sl.length_mm == 0.0


def test_seed_outside_mask_raises(straight_small):
    ph = straight_small
    maps = fitted_maps(ph)
    with pytest.raises(SeedOutsideMask):
        track_streamlines(maps, np.array([[0.0, 0.0, 0.0]]), ph.series.voxel_size)
    with pytest.raises(SeedOutsideMask):
        track_streamlines(maps, np.array([[-5.0, 0.0, 0.0]]), ph.series.voxel_size)


def test_u_arc_streamlines_follow_arc(uarc_acceptance):
    ph = uarc_acceptance
    maps = fitted_maps(ph)
    seeds = seed_lattice(maps, ph.series.voxel_size)
    assert len(seeds) > 20
    streamlines = track_streamlines(maps, seeds, ph.series.voxel_size)
    mean_len = mean_length_mm(streamlines)
    arc = ph.geometry_info["arc_length_mm"]
    assert mean_len > arc / 2.0
    # Streamline points stay near the arc tube.
    info = ph.geometry_info
    center = np.array(info["arc_center_mm"])
    u = np.array(info["plane_u"])
    n = np.array([0.0, -u[2], u[1]])
    for sl in streamlines[::7]:
        d = sl.points - center
        a = d @ np.array([1.0, 0.0, 0.0])
        b = d @ u
        w = d @ n
        rho = np.hypot(a, b)
        dist = np.sqrt((rho - info["arc_radius_mm"]) ** 2 + w**2)
        assert dist.max() <= info["tube_radius_mm"] + 2.0


def test_angle_stop_terminates():
    """A synthetic 90-degree direction discontinuity stops tracking."""
    shape = (21, 21, 5)
    fa = np.full(shape, 0.9)
    mask = np.ones(shape, dtype=bool)
    dirs = np.zeros(shape + (3,))
    dirs[:10, :, :] = [1.0, 0.0, 0.0]
    dirs[10:, :, :] = [0.0, 1.0, 0.0]

    from dmriqc.dwi.scalars import ScalarMaps

    maps = ScalarMaps(
        fa=fa, md=np.zeros(shape), principal_dir=dirs, mask=mask,
        eigenvalues=np.zeros(shape + (3,)), dropped_voxels=0,
        negative_eigenvalue_voxels=0,
    )
    sl = track_streamlines(
        maps, np.array([[2.0, 10.0, 2.0]]), (1.0, 1.0, 1.0), angle_stop_deg=45.0
    )[0]
    # Tracking along +x must stop near the discontinuity at x=10.
    assert sl.points[:, 0].max() < 12.0


def test_pure_python_env_override():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from dmriqc.dwi import BACKEND; print(BACKEND)"],
        env={"PATH": "/usr/bin:/bin", "DMRIQC_PURE_PYTHON": "1"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_kernel_lanes_bit_identical(uarc_small):
    backends = available_backends()
    if "cython" not in backends:
        pytest.skip("compiled kernel not built")
    ph = uarc_small
    maps = fitted_maps(ph)
    seeds = seed_lattice(maps, ph.series.voxel_size)
    cos_stop = math.cos(math.radians(45.0))
    args = (
        maps.principal_dir,
        maps.fa,
        maps.mask.astype(np.uint8),
        seeds,
        ph.series.voxel_size,
        1.0,
        0.2,
        cos_stop,
        10000,
    )
    a = get_track_all("cython")(*args)
    b = get_track_all("python")(*args)
    assert len(a) == len(b) == len(seeds)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
