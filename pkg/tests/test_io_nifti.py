"""NIfTI reader/writer: golden values, round-trips, structured failures."""

import gzip
import struct

import numpy as np
import pytest

from dmriqc.errors import BadHeader, BadMagic, EmptyVolume, TruncatedData, UnsupportedDatatype
from dmriqc.io import read_nifti, write_nifti
from dmriqc.io.nifti import HEADER_SIZE, Volume


def golden_bytes():
    """A 2x2x2 float32 image assembled field by field, independent of the writer."""
    header = bytearray(HEADER_SIZE)
    struct.pack_into("<i", header, 0, 348)
    struct.pack_into("<8h", header, 40, 3, 2, 2, 2, 1, 1, 1, 1)
    struct.pack_into("<h", header, 70, 16)  # float32
    struct.pack_into("<h", header, 72, 32)
    struct.pack_into("<8f", header, 76, 1.0, 2.0, 2.5, 3.0, 1.0, 1.0, 1.0, 1.0)
    struct.pack_into("<f", header, 108, 352.0)
    struct.pack_into("<f", header, 112, 1.0)
    header[344:348] = b"n+1\x00"
    values = [10.5, -1.25, 3.0, 0.0, 42.0, 7.5, -8.0, 100.0]  # Fortran order
    return bytes(header) + b"\x00" * 4 + struct.pack("<8f", *values)


def test_golden_fixture_bit_exact(tmp_path):
    p = tmp_path / "gold.nii"
    p.write_bytes(golden_bytes())
    vol = read_nifti(p)
    assert vol.dims == (2, 2, 2)
    assert vol.voxel_sizes == (2.0, 2.5, 3.0)
    assert vol.dtype_tag == "float32"
    want = np.array([10.5, -1.25, 3.0, 0.0, 42.0, 7.5, -8.0, 100.0]).reshape(
        (2, 2, 2), order="F"
    )
    assert np.array_equal(vol.data, want)


def test_bad_magic(tmp_path):
    blob = bytearray(golden_bytes())
    blob[344:348] = b"abcd"
    p = tmp_path / "bad.nii"
    p.write_bytes(bytes(blob))
    with pytest.raises(BadMagic):
        read_nifti(p)


def test_nifti2_named(tmp_path):
    blob = bytearray(golden_bytes())
    struct.pack_into("<i", blob, 0, 540)
    blob[344:348] = b"xxxx"
    p = tmp_path / "v2.nii"
    p.write_bytes(bytes(blob))
    with pytest.raises(UnsupportedDatatype, match="NIfTI-2"):
        read_nifti(p)


def test_unsupported_datatype(tmp_path):
    blob = bytearray(golden_bytes())
    struct.pack_into("<h", blob, 70, 128)  # RGB24: unsupported
    p = tmp_path / "rgb.nii"
    p.write_bytes(bytes(blob))
    with pytest.raises(UnsupportedDatatype):
        read_nifti(p)


def test_truncated_data(tmp_path):
    blob = golden_bytes()[:-8]
    p = tmp_path / "short.nii"
    p.write_bytes(blob)
    with pytest.raises(TruncatedData) as exc:
        read_nifti(p)
    assert exc.value.expected == 32
    assert exc.value.actual == 24


def test_big_endian_detected(tmp_path):
    header = bytearray(HEADER_SIZE)
    struct.pack_into(">i", header, 0, 348)
    struct.pack_into(">8h", header, 40, 3, 2, 1, 1, 1, 1, 1, 1)
    struct.pack_into(">h", header, 70, 4)  # int16
    struct.pack_into(">h", header, 72, 16)
    struct.pack_into(">8f", header, 76, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    struct.pack_into(">f", header, 108, 352.0)
    header[344:348] = b"n+1\x00"
    p = tmp_path / "be.nii"
    p.write_bytes(bytes(header) + b"\x00" * 4 + struct.pack(">2h", -7, 1200))
    vol = read_nifti(p)
    assert vol.data.ravel(order="F").tolist() == [-7.0, 1200.0]
    assert vol.dtype_tag == "int16"


def test_scl_slope_applied(tmp_path):
    blob = bytearray(golden_bytes())
    struct.pack_into("<f", blob, 112, 2.0)
    struct.pack_into("<f", blob, 116, 10.0)
    p = tmp_path / "scaled.nii"
    p.write_bytes(bytes(blob))
    vol = read_nifti(p)
    assert vol.data.ravel(order="F")[0] == 10.5 * 2.0 + 10.0
    assert vol.scl_slope == 2.0


def test_roundtrip_plain_and_gzip(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.normal(size=(5, 4, 3)).astype(np.float32).astype(np.float64)
    vol = Volume(data, (0.9, 1.1, 2.2))
    for name in ("a.nii", "a.nii.gz"):
        p = tmp_path / name
        write_nifti(vol, p)
        back = read_nifti(p)
        assert back.dims == vol.dims
        assert back.voxel_sizes == pytest.approx(vol.voxel_sizes, rel=1e-6)
        assert np.array_equal(back.data, vol.data)


def test_write_is_byte_stable(tmp_path):
    data = np.arange(24, dtype=np.float64).reshape(2, 3, 4)
    vol = Volume(data, (1.0, 1.0, 1.0))
    a, b = tmp_path / "a.nii.gz", tmp_path / "b.nii.gz"
    write_nifti(vol, a)
    write_nifti(vol, b)
    assert a.read_bytes() == b.read_bytes()


def test_write_read_write_identity(tmp_path):
    data = np.arange(24, dtype=np.float64).reshape(2, 3, 4)
    a = tmp_path / "a.nii"
    b = tmp_path / "b.nii"
    write_nifti(Volume(data, (1.0, 1.0, 1.0)), a)
    write_nifti(read_nifti(a), b)
    assert a.read_bytes() == b.read_bytes()


def test_zero_dim_rejected():
    with pytest.raises(EmptyVolume):
        Volume(np.zeros((0, 3, 3)), (1.0, 1.0, 1.0))


def test_bad_pixdim_rejected(tmp_path):
    blob = bytearray(golden_bytes())
    struct.pack_into("<f", blob, 80, -1.0)  # pixdim[1]
    p = tmp_path / "badpix.nii"
    p.write_bytes(bytes(blob))
    with pytest.raises(BadHeader):
        read_nifti(p)


def test_corrupt_gzip_is_structured(tmp_path):
    p = tmp_path / "x.nii.gz"
    blob = gzip.compress(golden_bytes())
    p.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(TruncatedData):
        read_nifti(p)


def test_4d_supported(tmp_path):
    data = np.arange(2 * 2 * 2 * 3, dtype=np.float64).reshape(2, 2, 2, 3)
    p = tmp_path / "4d.nii"
    write_nifti(Volume(data, (1.0, 1.0, 1.0)), p)
    assert read_nifti(p).dims == (2, 2, 2, 3)
