"""Small text table formats: outlier maps, connectome CSVs, motion traces.

Outlier map: one header comment line starting with '#', then one line per
volume of whitespace-separated 0/1 tokens, one per slice, rectangular.

Matrix CSV: comma-separated numeric rows, square.

Motion parameters: optional '#' comment lines, then one line per volume of
six numbers (tx ty tz in mm, rx ry rz in degrees).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..diagnostics.results import MotionTrace
from ..errors import (
    BadHeader,
    IoFailure,
    MalformedNumber,
    NonBinaryToken,
    NotSquare,
    RaggedRows,
)


def _read_text(path: Path) -> str:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedNumber(f"{path}: not valid UTF-8 text") from exc


def read_outlier_map(path: str | Path) -> np.ndarray:
    """(volumes x slices) boolean matrix of imputed slices."""
    path = Path(path)
    lines = _read_text(path).splitlines()
    if not lines or not lines[0].lstrip().startswith("#"):
        raise BadHeader(f"{path}: first line must be a '#' header comment")
    rows: list[list[bool]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        row = []
        for tok in line.split():
            if tok == "0":
                row.append(False)
            elif tok == "1":
                row.append(True)
            else:
                raise NonBinaryToken(f"{path}:{lineno}: token {tok!r} is not 0/1")
        if rows and len(row) != len(rows[0]):
            raise RaggedRows(
                f"{path}:{lineno}: {len(row)} slices, expected {len(rows[0])}"
            )
        rows.append(row)
    if not rows:
        raise BadHeader(f"{path}: no data rows")
    return np.array(rows, dtype=bool)


def write_outlier_map(matrix: np.ndarray, path: str | Path) -> None:
    m = np.asarray(matrix, dtype=bool)
    lines = [f"# outlier slices: {m.shape[0]} volumes x {m.shape[1]} slices"]
    for row in m.astype(int):
        lines.append(" ".join(str(int(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix_csv(path: str | Path) -> np.ndarray:
    """Square numeric matrix from comma-separated rows."""
    path = Path(path)
    rows: list[list[float]] = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for tok in line.split(","):
            tok = tok.strip()
            try:
                value = float(tok)
            except ValueError as exc:
                raise MalformedNumber(f"{path}:{lineno}: bad number {tok!r}") from exc
            if not np.isfinite(value):
                raise MalformedNumber(f"{path}:{lineno}: non-finite value {tok!r}")
            row.append(value)
        rows.append(row)
    if not rows:
        raise NotSquare(f"{path}: empty matrix")
    n = len(rows)
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n:
            raise NotSquare(f"{path}: row {lineno} has {len(row)} columns for {n} rows")
    return np.array(rows, dtype=np.float64)


def write_matrix_csv(matrix: np.ndarray, path: str | Path) -> None:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix is {m.shape}, expected square")
    lines = [",".join(f"{v:.17g}" for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_motion_params(path: str | Path) -> MotionTrace:
    """Per-volume rigid motion estimates: tx ty tz (mm), rx ry rz (deg)."""
    path = Path(path)
    rows: list[list[float]] = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = stripped.split()
        if len(toks) != 6:
            raise RaggedRows(f"{path}:{lineno}: expected 6 values, got {len(toks)}")
        row = []
        for tok in toks:
            try:
                value = float(tok)
            except ValueError as exc:
                raise MalformedNumber(f"{path}:{lineno}: bad number {tok!r}") from exc
            if not np.isfinite(value):
                raise MalformedNumber(f"{path}:{lineno}: non-finite value {tok!r}")
            row.append(value)
        rows.append(row)
    if not rows:
        raise BadHeader(f"{path}: no motion rows")
    arr = np.array(rows, dtype=np.float64)
    return MotionTrace(translations=arr[:, :3], rotations=arr[:, 3:])


def write_motion_params(trace: MotionTrace, path: str | Path) -> None:
    lines = ["# motion: tx ty tz (mm) rx ry rz (deg)"]
    for t, r in zip(trace.translations, trace.rotations):
        lines.append(" ".join(f"{v:.17g}" for v in (*t, *r)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
