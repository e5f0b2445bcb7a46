"""Minimal NIfTI-1 single-file reader and writer.

Implements exactly the subset used for QC artifacts: the 348-byte binary
header with magic ``n+1\\0``, little- or big-endian (detected via dim[0]
being in 1..7), datatypes uint8/int16/int32/float32/float64, intensity
scaling via scl_slope/scl_inter when slope is nonzero, and transparent
gzip by the ``.gz`` extension. NIfTI-2 and detached ``.hdr``/``.img``
pairs are rejected by name.

Writing always emits little-endian float32 with slope 1 / intercept 0 at
offset 352, all unused header fields zeroed, and gzip mtime pinned to 0,
so identical volumes produce identical bytes.
"""

from __future__ import annotations

import gzip
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import (
    BadHeader,
    BadMagic,
    EmptyVolume,
    IoFailure,
    TruncatedData,
    UnsupportedDatatype,
)

HEADER_SIZE = 348
MAGIC_SINGLE = b"n+1\x00"
MAGIC_PAIR = b"ni1\x00"
NIFTI2_SIZEOF = 540

# datatype code -> (numpy dtype char, tag)
DATATYPES = {
    2: ("u1", "uint8"),
    4: ("i2", "int16"),
    8: ("i4", "int32"),
    16: ("f4", "float32"),
    64: ("f8", "float64"),
}
DATATYPE_CODES = {tag: code for code, (_, tag) in DATATYPES.items()}


@dataclass
class Volume:
    """An up-to-4D image as float64, with its on-disk provenance."""

    data: np.ndarray
    voxel_sizes: tuple[float, float, float]
    dtype_tag: str = "float32"
    scl_slope: float = 1.0
    scl_inter: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim < 1 or self.data.ndim > 4:
            raise EmptyVolume(f"volume must be 1..4D, got {self.data.ndim}D")
        if self.data.size == 0:
            raise EmptyVolume(f"volume has a zero-sized dim: {self.data.shape}")
        self.voxel_sizes = tuple(float(v) for v in self.voxel_sizes)
        if len(self.voxel_sizes) != 3 or any(
            not np.isfinite(v) or v <= 0 for v in self.voxel_sizes
        ):
            raise BadHeader(f"voxel sizes must be positive, got {self.voxel_sizes}")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape


def _read_bytes(path: Path) -> bytes:
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rb") as fh:
                return fh.read()
        return path.read_bytes()
    except (gzip.BadGzipFile, EOFError, zlib.error) as exc:
        raise TruncatedData(0, 0, f"{path}: corrupt gzip stream ({exc})") from exc
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def read_nifti(path: str | Path) -> Volume:
    path = Path(path)
    raw = _read_bytes(path)
    if len(raw) < HEADER_SIZE + 4:
        raise TruncatedData(HEADER_SIZE + 4, len(raw), f"{path}: header")

    magic = raw[344:348]
    if magic == MAGIC_PAIR:
        raise UnsupportedDatatype(f"{path}: detached .hdr/.img pairs are not supported")
    if magic != MAGIC_SINGLE:
        sizeof_le = struct.unpack_from("<i", raw, 0)[0]
        sizeof_be = struct.unpack_from(">i", raw, 0)[0]
        if NIFTI2_SIZEOF in (sizeof_le, sizeof_be):
            raise UnsupportedDatatype(f"{path}: NIfTI-2 is not supported")
        raise BadMagic(f"{path}: bad magic {magic!r}")

    # dim[0] in 1..7 picks the byte order.
    endian = None
    for cand in ("<", ">"):
        ndim = struct.unpack_from(cand + "h", raw, 40)[0]
        if 1 <= ndim <= 7:
            endian = cand
            break
    if endian is None:
        raise BadHeader(f"{path}: dim[0] invalid in both byte orders")

    dim = struct.unpack_from(endian + "8h", raw, 40)
    ndim = dim[0]
    if ndim > 4:
        raise UnsupportedDatatype(f"{path}: {ndim}D images are not supported (max 4D)")
    shape = tuple(int(d) for d in dim[1 : 1 + ndim])
    if any(d < 1 for d in shape):
        raise BadHeader(f"{path}: non-positive dim {shape}")

    datatype_code = struct.unpack_from(endian + "h", raw, 70)[0]
    if datatype_code not in DATATYPES:
        raise UnsupportedDatatype(f"{path}: datatype code {datatype_code}")
    dchar, tag = DATATYPES[datatype_code]
    bitpix = struct.unpack_from(endian + "h", raw, 72)[0]
    itemsize = int(np.dtype(dchar).itemsize)
    if bitpix != itemsize * 8:
        raise BadHeader(f"{path}: bitpix {bitpix} inconsistent with datatype {tag}")

    pixdim = struct.unpack_from(endian + "8f", raw, 76)
    vsizes = []
    for i in range(3):
        v = float(pixdim[i + 1]) if i < ndim else 1.0
        if not np.isfinite(v) or v <= 0:
            raise BadHeader(f"{path}: pixdim[{i + 1}] = {v!r}")
        vsizes.append(v)

    vox_offset_f = struct.unpack_from(endian + "f", raw, 108)[0]
    if not np.isfinite(vox_offset_f) or vox_offset_f < HEADER_SIZE:
        raise BadHeader(f"{path}: vox_offset {vox_offset_f!r}")
    vox_offset = int(vox_offset_f)
    if vox_offset != vox_offset_f:
        raise BadHeader(f"{path}: non-integral vox_offset {vox_offset_f!r}")

    n_items = 1
    for d in shape:
        n_items *= d
    expected = n_items * itemsize
    available = len(raw) - vox_offset
    if available < expected:
        raise TruncatedData(expected, max(available, 0), f"{path}: data")

    flat = np.frombuffer(raw, dtype=endian + dchar, count=n_items, offset=vox_offset)
    data = flat.reshape(shape, order="F").astype(np.float64)

    slope = float(struct.unpack_from(endian + "f", raw, 112)[0])
    inter = float(struct.unpack_from(endian + "f", raw, 116)[0])
    if slope != 0.0 and not (slope == 1.0 and inter == 0.0):
        with np.errstate(invalid="ignore", over="ignore"):
            data = data * slope + inter
    return Volume(
        data=data,
        voxel_sizes=tuple(vsizes),
        dtype_tag=tag,
        scl_slope=slope if slope != 0.0 else 1.0,
        scl_inter=inter if slope != 0.0 else 0.0,
    )


def write_nifti(volume: Volume, path: str | Path) -> None:
    """Serialize as float32 little-endian, deterministically."""
    path = Path(path)
    data = np.asarray(volume.data, dtype=np.float64)
    if data.size == 0:
        raise EmptyVolume(f"refusing to write empty volume {data.shape}")
    ndim = data.ndim

    if any(d > 32767 for d in data.shape):
        raise BadHeader(f"dims {data.shape} exceed the NIfTI-1 short range")

    header = bytearray(HEADER_SIZE)
    struct.pack_into("<i", header, 0, HEADER_SIZE)
    dim = [ndim] + list(data.shape) + [1] * (7 - ndim)
    struct.pack_into("<8h", header, 40, *dim)
    struct.pack_into("<h", header, 70, DATATYPE_CODES["float32"])
    struct.pack_into("<h", header, 72, 32)  # bitpix
    pixdim = [1.0] + list(volume.voxel_sizes) + [1.0] * 4
    struct.pack_into("<8f", header, 76, *pixdim)
    struct.pack_into("<f", header, 108, 352.0)  # vox_offset
    struct.pack_into("<f", header, 112, 1.0)  # scl_slope
    struct.pack_into("<f", header, 116, 0.0)  # scl_inter
    header[344:348] = MAGIC_SINGLE

    payload = np.asarray(data, dtype="<f4").ravel(order="F").tobytes()
    blob = bytes(header) + b"\x00" * 4 + payload

    try:
        if path.suffix == ".gz":
            import io as _io

            buf = _io.BytesIO()
            with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as fh:
                fh.write(blob)
            path.write_bytes(buf.getvalue())
        else:
            path.write_bytes(blob)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
