# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled streamline tracking kernel.

Twin of ``_tracking_py``: identical arithmetic in identical order, compiled
with -ffp-contract=off so both lanes emit bit-identical streamlines. Any
change here must be mirrored in the Python lane.
"""

from libc.math cimport floor, sqrt

import numpy as np

BACKEND = "cython"


cdef int _march(double[:, :, :, ::1] dirs, double[:, :, ::1] fa,
                unsigned char[:, :, ::1] mask,
                int nx, int ny, int nz,
                double vx, double vy, double vz,
                double px, double py, double pz,
                double dx, double dy, double dz,
                double step, double fa_stop, double cos_stop,
                int max_steps, double[:, ::1] buf) nogil:
    cdef int count = 0
    cdef int steps, ri, rj, rk, i0, j0, k0, ci, cj, ck
    cdef double qx, qy, qz, cx, cy, cz, fx, fy, fz
    cdef double fa_val, ax, ay, az, wi, wj, wk, w, ex, ey, ez, norm
    for steps in range(max_steps):
        qx = px + step * dx
        qy = py + step * dy
        qz = pz + step * dz
        cx = qx / vx
        cy = qy / vy
        cz = qz / vz
        if not (0.0 <= cx <= nx - 1 and 0.0 <= cy <= ny - 1 and 0.0 <= cz <= nz - 1):
            break
        ri = <int>floor(cx + 0.5)
        rj = <int>floor(cy + 0.5)
        rk = <int>floor(cz + 0.5)
        if mask[ri, rj, rk] == 0:
            break

        i0 = <int>floor(cx)
        j0 = <int>floor(cy)
        k0 = <int>floor(cz)
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
        for ci in range(2):
            wi = fx if ci else 1.0 - fx
            for cj in range(2):
                wj = fy if cj else 1.0 - fy
                for ck in range(2):
                    wk = fz if ck else 1.0 - fz
                    w = wi * wj * wk
                    fa_val += w * fa[i0 + ci, j0 + cj, k0 + ck]
                    ex = dirs[i0 + ci, j0 + cj, k0 + ck, 0]
                    ey = dirs[i0 + ci, j0 + cj, k0 + ck, 1]
                    ez = dirs[i0 + ci, j0 + cj, k0 + ck, 2]
                    if ex * dx + ey * dy + ez * dz < 0.0:
                        ex = -ex
                        ey = -ey
                        ez = -ez
                    ax += w * ex
                    ay += w * ey
                    az += w * ez
        if fa_val < fa_stop:
            break
        buf[count, 0] = qx
        buf[count, 1] = qy
        buf[count, 2] = qz
        count += 1
        px = qx
        py = qy
        pz = qz

        norm = sqrt(ax * ax + ay * ay + az * az)
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
    return count


cdef int _seed_direction(double[:, :, :, ::1] dirs,
                         int nx, int ny, int nz,
                         double vx, double vy, double vz,
                         double sx, double sy, double sz,
                         double* out) nogil:
    cdef double cx = sx / vx
    cdef double cy = sy / vy
    cdef double cz = sz / vz
    cdef int ri = <int>floor(cx + 0.5)
    cdef int rj = <int>floor(cy + 0.5)
    cdef int rk = <int>floor(cz + 0.5)
    cdef double dx = dirs[ri, rj, rk, 0]
    cdef double dy = dirs[ri, rj, rk, 1]
    cdef double dz = dirs[ri, rj, rk, 2]

    cdef int i0 = <int>floor(cx)
    cdef int j0 = <int>floor(cy)
    cdef int k0 = <int>floor(cz)
    if i0 == nx - 1:
        i0 -= 1
    if j0 == ny - 1:
        j0 -= 1
    if k0 == nz - 1:
        k0 -= 1
    cdef double fx = cx - i0
    cdef double fy = cy - j0
    cdef double fz = cz - k0
    cdef double ax = 0.0
    cdef double ay = 0.0
    cdef double az = 0.0
    cdef int ci, cj, ck
    cdef double wi, wj, wk, w, ex, ey, ez
    for ci in range(2):
        wi = fx if ci else 1.0 - fx
        for cj in range(2):
            wj = fy if cj else 1.0 - fy
            for ck in range(2):
                wk = fz if ck else 1.0 - fz
                w = wi * wj * wk
                ex = dirs[i0 + ci, j0 + cj, k0 + ck, 0]
                ey = dirs[i0 + ci, j0 + cj, k0 + ck, 1]
                ez = dirs[i0 + ci, j0 + cj, k0 + ck, 2]
                if ex * dx + ey * dy + ez * dz < 0.0:
                    ex = -ex
                    ey = -ey
                    ez = -ez
                ax += w * ex
                ay += w * ey
                az += w * ez
    cdef double norm = sqrt(ax * ax + ay * ay + az * az)
    if norm < 1e-12:
        return 0
    out[0] = ax / norm
    out[1] = ay / norm
    out[2] = az / norm
    return 1


cdef double _fa_at(double[:, :, ::1] fa,
                   int nx, int ny, int nz,
                   double vx, double vy, double vz,
                   double sx, double sy, double sz) nogil:
    cdef double cx = sx / vx
    cdef double cy = sy / vy
    cdef double cz = sz / vz
    cdef int i0 = <int>floor(cx)
    cdef int j0 = <int>floor(cy)
    cdef int k0 = <int>floor(cz)
    if i0 == nx - 1:
        i0 -= 1
    if j0 == ny - 1:
        j0 -= 1
    if k0 == nz - 1:
        k0 -= 1
    cdef double fx = cx - i0
    cdef double fy = cy - j0
    cdef double fz = cz - k0
    cdef double val = 0.0
    cdef int ci, cj, ck
    cdef double wi, wj, wk
    for ci in range(2):
        wi = fx if ci else 1.0 - fx
        for cj in range(2):
            wj = fy if cj else 1.0 - fy
            for ck in range(2):
                wk = fz if ck else 1.0 - fz
                val += wi * wj * wk * fa[i0 + ci, j0 + cj, k0 + ck]
    return val


def track_all(dirs, fa, mask, seeds_mm, voxel_size,
              double step_mm, double fa_stop, double cos_stop, int max_steps):
    cdef double[:, :, :, ::1] dirs_v = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef double[:, :, ::1] fa_v = np.ascontiguousarray(fa, dtype=np.float64)
    cdef unsigned char[:, :, ::1] mask_v = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef int nx = fa_v.shape[0]
    cdef int ny = fa_v.shape[1]
    cdef int nz = fa_v.shape[2]
    cdef double vx = voxel_size[0]
    cdef double vy = voxel_size[1]
    cdef double vz = voxel_size[2]

    seeds = np.ascontiguousarray(seeds_mm, dtype=np.float64)
    fwd_buf = np.empty((max_steps, 3), dtype=np.float64)
    bwd_buf = np.empty((max_steps, 3), dtype=np.float64)
    cdef double[:, ::1] fwd_v = fwd_buf
    cdef double[:, ::1] bwd_v = bwd_buf

    cdef double sx, sy, sz
    cdef double d0[3]
    cdef int n_f, n_b, i
    out = []
    for seed in seeds:
        sx = seed[0]
        sy = seed[1]
        sz = seed[2]
        if _fa_at(fa_v, nx, ny, nz, vx, vy, vz, sx, sy, sz) < fa_stop:
            out.append(np.array([[sx, sy, sz]], dtype=np.float64))
            continue
        if not _seed_direction(dirs_v, nx, ny, nz, vx, vy, vz, sx, sy, sz, d0):
            out.append(np.array([[sx, sy, sz]], dtype=np.float64))
            continue
        n_f = _march(dirs_v, fa_v, mask_v, nx, ny, nz, vx, vy, vz,
                     sx, sy, sz, d0[0], d0[1], d0[2],
                     step_mm, fa_stop, cos_stop, max_steps, fwd_v)
        n_b = _march(dirs_v, fa_v, mask_v, nx, ny, nz, vx, vy, vz,
                     sx, sy, sz, -d0[0], -d0[1], -d0[2],
                     step_mm, fa_stop, cos_stop, max_steps, bwd_v)
        pts = np.empty((n_b + 1 + n_f, 3), dtype=np.float64)
        for i in range(n_b):
            pts[i, 0] = bwd_v[n_b - 1 - i, 0]
            pts[i, 1] = bwd_v[n_b - 1 - i, 1]
            pts[i, 2] = bwd_v[n_b - 1 - i, 2]
        pts[n_b, 0] = sx
        pts[n_b, 1] = sy
        pts[n_b, 2] = sz
        for i in range(n_f):
            pts[n_b + 1 + i, 0] = fwd_v[i, 0]
            pts[n_b + 1 + i, 1] = fwd_v[i, 1]
            pts[n_b + 1 + i, 2] = fwd_v[i, 2]
        out.append(pts)
    return out
