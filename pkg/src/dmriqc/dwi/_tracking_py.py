"""Pure-Python streamline tracking kernel.

Twin of the compiled kernel in ``_tracking_cy.pyx``: same arithmetic in the
same order (the extension is built with FP contraction off), so the two
lanes produce bit-identical streamlines. Keep any change here mirrored
there.

Positions are in mm; index space is position / voxel_size, i.e. voxel
centers sit at integer multiples of the voxel size.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def _march(
    dirs: list[float],
    fa: list[float],
    mask: list[int],
    nx: int,
    ny: int,
    nz: int,
    vx: float,
    vy: float,
    vz: float,
    px: float,
    py: float,
    pz: float,
    dx: float,
    dy: float,
    dz: float,
    step: float,
    fa_stop: float,
    cos_stop: float,
    max_steps: int,
) -> list[float]:
    out: list[float] = []
    for _ in range(max_steps):
        qx = px + step * dx
        qy = py + step * dy
        qz = pz + step * dz
        cx = qx / vx
        cy = qy / vy
        cz = qz / vz
        if not (0.0 <= cx <= nx - 1 and 0.0 <= cy <= ny - 1 and 0.0 <= cz <= nz - 1):
            break
        ri = int(math.floor(cx + 0.5))
        rj = int(math.floor(cy + 0.5))
        rk = int(math.floor(cz + 0.5))
        if not mask[(ri * ny + rj) * nz + rk]:
            break

        i0 = int(math.floor(cx))
        j0 = int(math.floor(cy))
        k0 = int(math.floor(cz))
        if i0 == nx - 1:
            i0 -= 1
        if j0 == ny - 1:
            j0 -= 1
        if k0 == nz - 1:
            k0 -= 1
        fx = cx - i0
        fy = cy - j0
        fz = cz - k0

        fa_val = 0.0
        ax = 0.0
        ay = 0.0
        az = 0.0
        for ci in (0, 1):
            wi = fx if ci else 1.0 - fx
            for cj in (0, 1):
                wj = fy if cj else 1.0 - fy
                for ck in (0, 1):
                    wk = fz if ck else 1.0 - fz
                    w = wi * wj * wk
                    base = ((i0 + ci) * ny + (j0 + cj)) * nz + (k0 + ck)
                    fa_val += w * fa[base]
                    b3 = base * 3
                    ex = dirs[b3]
                    ey = dirs[b3 + 1]
                    ez = dirs[b3 + 2]
                    if ex * dx + ey * dy + ez * dz < 0.0:
                        ex = -ex
                        ey = -ey
                        ez = -ez
                    ax += w * ex
                    ay += w * ey
                    az += w * ez
        if fa_val < fa_stop:
            break
        out.append(qx)
        out.append(qy)
        out.append(qz)
        px = qx
        py = qy
        pz = qz

        norm = math.sqrt(ax * ax + ay * ay + az * az)
        if norm < 1e-12:
            break
        ax /= norm
        ay /= norm
        az /= norm
        if ax * dx + ay * dy + az * dz < cos_stop:
            break
        dx = ax
        dy = ay
        dz = az
    return out


def _seed_direction(
    dirs: list[float],
    nx: int,
    ny: int,
    nz: int,
    vx: float,
    vy: float,
    vz: float,
    sx: float,
    sy: float,
    sz: float,
) -> tuple[float, float, float]:
    """Trilinear direction at the seed, referenced to the nearest voxel's vector."""
    cx = sx / vx
    cy = sy / vy
    cz = sz / vz
    ri = int(math.floor(cx + 0.5))
    rj = int(math.floor(cy + 0.5))
    rk = int(math.floor(cz + 0.5))
    rbase = ((ri * ny + rj) * nz + rk) * 3
    dx = dirs[rbase]
    dy = dirs[rbase + 1]
    dz = dirs[rbase + 2]

    i0 = int(math.floor(cx))
    j0 = int(math.floor(cy))
    k0 = int(math.floor(cz))
    if i0 == nx - 1:
        i0 -= 1
    if j0 == ny - 1:
        j0 -= 1
    if k0 == nz - 1:
        k0 -= 1
    fx = cx - i0
    fy = cy - j0
    fz = cz - k0
    ax = 0.0
    ay = 0.0
    az = 0.0
    for ci in (0, 1):
        wi = fx if ci else 1.0 - fx
        for cj in (0, 1):
            wj = fy if cj else 1.0 - fy
            for ck in (0, 1):
                wk = fz if ck else 1.0 - fz
                w = wi * wj * wk
                b3 = (((i0 + ci) * ny + (j0 + cj)) * nz + (k0 + ck)) * 3
                ex = dirs[b3]
                ey = dirs[b3 + 1]
                ez = dirs[b3 + 2]
                if ex * dx + ey * dy + ez * dz < 0.0:
                    ex = -ex
                    ey = -ey
                    ez = -ez
                ax += w * ex
                ay += w * ey
                az += w * ez
    norm = math.sqrt(ax * ax + ay * ay + az * az)
    if norm < 1e-12:
        return (0.0, 0.0, 0.0)
    return (ax / norm, ay / norm, az / norm)


def _fa_at(
    fa: list[float],
    nx: int,
    ny: int,
    nz: int,
    vx: float,
    vy: float,
    vz: float,
    sx: float,
    sy: float,
    sz: float,
) -> float:
    cx = sx / vx
    cy = sy / vy
    cz = sz / vz
    i0 = int(math.floor(cx))
    j0 = int(math.floor(cy))
    k0 = int(math.floor(cz))
    if i0 == nx - 1:
        i0 -= 1
    if j0 == ny - 1:
        j0 -= 1
    if k0 == nz - 1:
        k0 -= 1
    fx = cx - i0
    fy = cy - j0
    fz = cz - k0
    val = 0.0
    for ci in (0, 1):
        wi = fx if ci else 1.0 - fx
        for cj in (0, 1):
            wj = fy if cj else 1.0 - fy
            for ck in (0, 1):
                wk = fz if ck else 1.0 - fz
                val += wi * wj * wk * fa[((i0 + ci) * ny + (j0 + cj)) * nz + (k0 + ck)]
    return val


def track_all(
    dirs: np.ndarray,
    fa: np.ndarray,
    mask: np.ndarray,
    seeds_mm: np.ndarray,
    voxel_size: tuple[float, float, float],
    step_mm: float,
    fa_stop: float,
    cos_stop: float,
    max_steps: int,
) -> list[np.ndarray]:
    nx, ny, nz = fa.shape
    vx, vy, vz = (float(v) for v in voxel_size)
    dirs_l = np.ascontiguousarray(dirs, dtype=np.float64).ravel().tolist()
    fa_l = np.ascontiguousarray(fa, dtype=np.float64).ravel().tolist()
    mask_l = np.ascontiguousarray(mask, dtype=np.uint8).ravel().tolist()

    out: list[np.ndarray] = []
    for seed in np.asarray(seeds_mm, dtype=np.float64):
        sx, sy, sz = (float(seed[0]), float(seed[1]), float(seed[2]))
        if _fa_at(fa_l, nx, ny, nz, vx, vy, vz, sx, sy, sz) < fa_stop:
            out.append(np.array([[sx, sy, sz]], dtype=np.float64))
            continue
        dx, dy, dz = _seed_direction(dirs_l, nx, ny, nz, vx, vy, vz, sx, sy, sz)
        if dx == 0.0 and dy == 0.0 and dz == 0.0:
            out.append(np.array([[sx, sy, sz]], dtype=np.float64))
            continue
        fwd = _march(
            dirs_l, fa_l, mask_l, nx, ny, nz, vx, vy, vz,
            sx, sy, sz, dx, dy, dz, step_mm, fa_stop, cos_stop, max_steps,
        )
        bwd = _march(
            dirs_l, fa_l, mask_l, nx, ny, nz, vx, vy, vz,
            sx, sy, sz, -dx, -dy, -dz, step_mm, fa_stop, cos_stop, max_steps,
        )
        n_b = len(bwd) // 3
        n_f = len(fwd) // 3
        pts = np.empty((n_b + 1 + n_f, 3), dtype=np.float64)
        for i in range(n_b):
            src = (n_b - 1 - i) * 3
            pts[i, 0] = bwd[src]
            pts[i, 1] = bwd[src + 1]
            pts[i, 2] = bwd[src + 2]
        pts[n_b] = (sx, sy, sz)
        for i in range(n_f):
            pts[n_b + 1 + i] = (fwd[i * 3], fwd[i * 3 + 1], fwd[i * 3 + 2])
        out.append(pts)
    return out
