"""Bit-flip robustness: every reader either parses or raises a QcError.

Each format's golden fixture is mutated 1,000+ times by flipping a single
bit at a deterministic pseudo-random position. A reader may accept the
mutation (payload bits are data, not structure), but it must never escape
with anything other than the package's structured errors.
"""

import json

import numpy as np
import pytest

from dmriqc.errors import QcError
from dmriqc.io import (
    load_ledger,
    load_manifest,
    read_gradients,
    read_matrix_csv,
    read_motion_params,
    read_nifti,
    read_outlier_map,
    read_tck,
)
from dmriqc.model.graph import load_graph

N_MUTATIONS = 1000


def flip_bit(data: bytes, position: int) -> bytes:
    byte_i = (position // 8) % len(data)
    bit = position % 8
    out = bytearray(data)
    out[byte_i] ^= 1 << bit
    return bytes(out)


def run_fuzz(fixture_bytes: bytes, parse, n=N_MUTATIONS):
    rng = np.random.default_rng(20260810)
    positions = rng.integers(0, len(fixture_bytes) * 8, size=n)
    survived = 0
    rejected = 0
    for pos in positions:
        mutated = flip_bit(fixture_bytes, int(pos))
        try:
            parse(mutated)
            survived += 1
        except QcError:
            rejected += 1
        # Anything else propagates and fails the test.
    assert survived + rejected == n
    return survived, rejected


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("fuzz")


def write_and_parse(workdir, name, reader):
    target = workdir / name

    def parse(blob: bytes):
        target.write_bytes(blob)
        return reader(target)

    return parse


def test_fuzz_nifti(workdir):
    from test_io_nifti import golden_bytes

    parse = write_and_parse(workdir, "f.nii", read_nifti)
    run_fuzz(golden_bytes(), parse)


def test_fuzz_gradients(workdir):
    bval = b"0 1000 1000 1000\n"
    bvec = b"0 1 0 0.7071067\n0 0 1 0.7071067\n0 0 0 0\n"
    bval_path = workdir / "f.bval"
    bvec_path = workdir / "f.bvec"

    def parse_bval(blob):
        bval_path.write_bytes(blob)
        bvec_path.write_bytes(bvec)
        return read_gradients(bval_path, bvec_path)

    def parse_bvec(blob):
        bval_path.write_bytes(bval)
        bvec_path.write_bytes(blob)
        return read_gradients(bval_path, bvec_path)

    run_fuzz(bval, parse_bval, n=500)
    run_fuzz(bvec, parse_bvec, n=500)


def test_fuzz_tck(workdir):
    from test_io_text_formats import TestTck

    parse = write_and_parse(workdir, "f.tck", read_tck)
    run_fuzz(TestTck().fixture_bytes(), parse)


def test_fuzz_outlier_map(workdir):
    fixture = b"# outliers\n" + b"\n".join(b"0 1 0 0 1 0" for _ in range(6)) + b"\n"
    parse = write_and_parse(workdir, "f.txt", read_outlier_map)
    run_fuzz(fixture, parse)


def test_fuzz_matrix_csv(workdir):
    rng = np.random.default_rng(5)
    rows = [",".join(f"{v:.4f}" for v in row) for row in rng.random((6, 6))]
    fixture = ("\n".join(rows) + "\n").encode()
    parse = write_and_parse(workdir, "f.csv", read_matrix_csv)
    run_fuzz(fixture, parse)


def test_fuzz_motion(workdir):
    fixture = b"# motion\n" + b"\n".join(
        b"0.1 0.2 0.3 0.01 0.02 0.03" for _ in range(8)
    ) + b"\n"
    parse = write_and_parse(workdir, "f.txt", read_motion_params)
    run_fuzz(fixture, parse)


def test_fuzz_manifest(workdir):
    doc = {
        "graph": "graph.yaml",
        "scans": [
            {
                "subject_id": "subA",
                "session_id": "sesA",
                "scan_id": "scan01",
                "artifacts": {"PreQual": {"dwi": "dwi.nii"}},
            }
        ],
    }
    fixture = json.dumps(doc, indent=1).encode()

    def parse(blob):
        target = workdir / "manifest.json"
        target.write_bytes(blob)
        try:
            return load_manifest(target)
        except ValueError as exc:
            # EntityRef id validation surfaces as ValueError by design;
            # treat it as the structured rejection it is.
            raise QcError(str(exc)) from exc

    run_fuzz(fixture, parse)


def test_fuzz_ledger(workdir):
    from test_io_manifest_ledger import make_verdict
    from dmriqc.io.ledger import verdict_line

    fixture = b"".join(verdict_line(make_verdict(i)) for i in range(4))
    parse = write_and_parse(workdir, "f.jsonl", load_ledger)
    run_fuzz(fixture, parse)


def test_fuzz_graph_yaml(workdir):
    from fixture_dataset import GRAPH_YAML

    def parse(blob):
        target = workdir / "graph.yaml"
        target.write_bytes(blob)
        try:
            return load_graph(target)
        except ValueError as exc:
            raise QcError(str(exc)) from exc

    run_fuzz(GRAPH_YAML.encode(), parse)
