"""Append-only verdict ledger: one JSON record per line.

Plain text keeps the QC history auditable and diffable. Appends take an
exclusive flock and write a single line followed by flush+fsync, so
concurrent writers interleave whole lines and a crash can tear at most
the final line. Loading tolerates that torn final line (skipped and
reported); malformed interior lines are schema violations.
"""

from __future__ import annotations

import fcntl
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import IoFailure, SchemaViolation
from ..model.verdicts import QcVerdict


@dataclass
class VerdictLedger:
    path: Path
    verdicts: list[QcVerdict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.verdicts)


def verdict_line(verdict: QcVerdict) -> bytes:
    return (
        json.dumps(verdict.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=True)
        + "\n"
    ).encode("utf-8")


def append_verdict(ledger_path: str | Path, verdict: QcVerdict) -> None:
    path = Path(ledger_path)
    line = verdict_line(verdict)
    try:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    try:
        fcntl.flock(fd, fcntl.LOCK_EX)
        try:
            os.write(fd, line)
            os.fsync(fd)
        finally:
            fcntl.flock(fd, fcntl.LOCK_UN)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    finally:
        os.close(fd)


def load_ledger(ledger_path: str | Path) -> VerdictLedger:
    path = Path(ledger_path)
    if not path.exists():
        return VerdictLedger(path=path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc

    ledger = VerdictLedger(path=path)
    lines = raw.split(b"\n")
    # A trailing newline leaves one empty tail element; its absence marks
    # a torn final line.
    complete = lines[:-1]
    tail = lines[-1]
    for lineno, line in enumerate(complete, start=1):
        if not line.strip():
            continue
        ledger.verdicts.append(_parse_line(line, path, lineno))
    if tail.strip():
        try:
            ledger.verdicts.append(_parse_line(tail, path, len(lines)))
            ledger.warnings.append(f"{path}: final line lacks a newline (recovered)")
        except SchemaViolation:
            ledger.warnings.append(
                f"{path}: torn final line skipped ({len(tail)} bytes)"
            )
    return ledger


def _parse_line(line: bytes, path: Path, lineno: int) -> QcVerdict:
    try:
        record = json.loads(line.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaViolation(f"{path}:{lineno}: unparseable record: {exc}") from exc
    if not isinstance(record, dict):
        raise SchemaViolation(f"{path}:{lineno}: record must be an object")
    try:
        return QcVerdict.from_dict(record)
    except SchemaViolation as exc:
        raise SchemaViolation(f"{path}:{lineno}: {exc}") from exc
