"""FSL-style bval/bvec text files.

bval: one whitespace-separated line of N b-values.
bvec: three lines of N numbers (x, y, z rows).

Vectors with norm inside [0.9, 1.1] are renormalized to unit length;
zero vectors are kept for b0 rows. Anything else is a NonUnitVector.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..dwi.types import B0_MAX, GradientTable
from ..errors import CountMismatch, IoFailure, MalformedNumber, NonUnitVector

NORM_BAND = (0.9, 1.1)


def _read_text(path: Path) -> str:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedNumber(f"{path}: not valid UTF-8 text") from exc


def _parse_row(line: str, path: Path, lineno: int) -> list[float]:
    out = []
    for tok in line.split():
        try:
            value = float(tok)
        except ValueError as exc:
            raise MalformedNumber(f"{path}:{lineno}: bad number {tok!r}") from exc
        if not np.isfinite(value):
            raise MalformedNumber(f"{path}:{lineno}: non-finite value {tok!r}")
        out.append(value)
    return out


def _data_lines(text: str) -> list[tuple[int, str]]:
    return [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]


def read_gradients(bval_path: str | Path, bvec_path: str | Path) -> GradientTable:
    bval_path = Path(bval_path)
    bvec_path = Path(bvec_path)

    bval_lines = _data_lines(_read_text(bval_path))
    if len(bval_lines) != 1:
        raise CountMismatch(f"{bval_path}: expected 1 line of b-values, got {len(bval_lines)}")
    bvals = _parse_row(bval_lines[0][1], bval_path, bval_lines[0][0])
    if not bvals:
        raise CountMismatch(f"{bval_path}: no b-values")
    if any(b < 0 for b in bvals):
        raise MalformedNumber(f"{bval_path}: negative b-value")

    bvec_lines = _data_lines(_read_text(bvec_path))
    if len(bvec_lines) != 3:
        raise CountMismatch(f"{bvec_path}: expected 3 component rows, got {len(bvec_lines)}")
    rows = []
    for lineno, line in bvec_lines:
        row = _parse_row(line, bvec_path, lineno)
        if len(row) != len(bvals):
            raise CountMismatch(
                f"{bvec_path}:{lineno}: {len(row)} entries but {len(bvals)} b-values"
            )
        rows.append(row)
    vecs = np.array(rows, dtype=np.float64).T  # (N, 3)

    norms = np.linalg.norm(vecs, axis=1)
    for i, (b, norm) in enumerate(zip(bvals, norms)):
        if norm == 0.0:
            if b > B0_MAX:
                raise NonUnitVector(f"{bvec_path}: zero vector for b={b:g} (volume {i})")
            continue
        if not (NORM_BAND[0] <= norm <= NORM_BAND[1]):
            raise NonUnitVector(
                f"{bvec_path}: |g|={norm:.4f} outside {NORM_BAND} (volume {i})"
            )
        vecs[i] /= norm
    return GradientTable(np.array(bvals, dtype=np.float64), vecs)


def write_gradients(table: GradientTable, bval_path: str | Path, bvec_path: str | Path) -> None:
    """Fixture/phantom export in the same layout read_gradients expects."""
    bvals = " ".join(f"{b:.6g}" for b in table.bvals)
    Path(bval_path).write_text(bvals + "\n", encoding="utf-8")
    lines = []
    for axis in range(3):
        lines.append(" ".join(f"{v:.17g}" for v in table.bvecs[:, axis]))
    Path(bvec_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
