"""Track file reader/writer (mrtrix tracks format, Float32LE only).

Layout: an ASCII header whose first line is ``mrtrix tracks``, then
``key: value`` lines including ``datatype: Float32LE`` and
``file: . <offset>``, terminated by a line reading ``END``. The binary
payload starts at the byte offset from the ``file`` field: little-endian
float32 (x, y, z) triplets, with a (NaN, NaN, NaN) triplet closing each
streamline and an (Inf, Inf, Inf) triplet closing the stream.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..dwi.tracking import Streamline
from ..errors import BadHeader, IoFailure, TruncatedData, UnsupportedDatatype, UnterminatedStream

FIRST_LINE = b"mrtrix tracks"
MAX_HEADER_BYTES = 65536


def _parse_header(raw: bytes, path: Path) -> tuple[dict[str, str], int]:
    limit = min(len(raw), MAX_HEADER_BYTES)
    pos = 0
    fields: dict[str, str] = {}
    first = True
    while pos < limit:
        nl = raw.find(b"\n", pos, limit)
        if nl == -1:
            break
        line = raw[pos:nl]
        pos = nl + 1
        if first:
            if line.strip() != FIRST_LINE:
                raise BadHeader(f"{path}: first line is not 'mrtrix tracks'")
            first = False
            continue
        if line.strip() == b"END":
            return fields, pos
        try:
            text = line.decode("ascii")
        except UnicodeDecodeError as exc:
            raise BadHeader(f"{path}: non-ASCII header line") from exc
        if ":" not in text:
            raise BadHeader(f"{path}: malformed header line {text!r}")
        key, _, value = text.partition(":")
        fields[key.strip()] = value.strip()
    raise BadHeader(f"{path}: header END line not found")


def read_tck(path: str | Path) -> list[Streamline]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    fields, header_end = _parse_header(raw, path)

    datatype = fields.get("datatype")
    if datatype is None:
        raise BadHeader(f"{path}: missing datatype field")
    if datatype != "Float32LE":
        raise UnsupportedDatatype(f"{path}: datatype {datatype!r} (only Float32LE)")

    file_field = fields.get("file")
    if file_field is None:
        raise BadHeader(f"{path}: missing file field")
    parts = file_field.split()
    if len(parts) != 2 or parts[0] != ".":
        raise BadHeader(f"{path}: file field must be '. <offset>', got {file_field!r}")
    try:
        offset = int(parts[1])
    except ValueError as exc:
        raise BadHeader(f"{path}: bad offset {parts[1]!r}") from exc
    if offset < header_end or offset > len(raw):
        raise BadHeader(f"{path}: offset {offset} outside file (header ends at {header_end})")

    payload = raw[offset:]
    if len(payload) % 12 != 0:
        raise TruncatedData(len(payload) + (12 - len(payload) % 12), len(payload), f"{path}: payload")
    with np.errstate(invalid="ignore"):  # signaling NaNs in corrupt payloads
        triplets = np.frombuffer(payload, dtype="<f4").reshape(-1, 3).astype(np.float64)

    streamlines: list[Streamline] = []
    current: list[np.ndarray] = []
    ended = False
    count = 0
    for t in triplets:
        if math.isinf(t[0]) and math.isinf(t[1]) and math.isinf(t[2]):
            if current:
                streamlines.append(Streamline(np.array(current)))
                current = []
            ended = True
            break
        if math.isnan(t[0]) or math.isnan(t[1]) or math.isnan(t[2]):
            if not (math.isnan(t[0]) and math.isnan(t[1]) and math.isnan(t[2])):
                raise BadHeader(f"{path}: partial NaN separator at triplet {count}")
            if current:
                streamlines.append(Streamline(np.array(current)))
                current = []
        else:
            current.append(t)
        count += 1
    if not ended:
        raise UnterminatedStream(f"{path}: missing Inf terminator")

    declared = fields.get("count")
    if declared is not None:
        try:
            n = int(declared)
        except ValueError as exc:
            raise BadHeader(f"{path}: bad count {declared!r}") from exc
        if n != len(streamlines):
            raise BadHeader(f"{path}: count field says {n}, parsed {len(streamlines)}")
    return streamlines


def write_tck(streamlines: list[Streamline], path: str | Path) -> None:
    """Emit the same dialect read_tck parses; byte-stable for fixed input."""
    path = Path(path)
    body_parts = []
    for s in streamlines:
        body_parts.append(np.asarray(s.points, dtype="<f4").tobytes())
        body_parts.append(np.array([[np.nan, np.nan, np.nan]], dtype="<f4").tobytes())
    body_parts.append(np.array([[np.inf, np.inf, np.inf]], dtype="<f4").tobytes())
    body = b"".join(body_parts)

    base = (
        f"mrtrix tracks\ndatatype: Float32LE\ncount: {len(streamlines)}\n"
    )
    # The offset appears inside the header, so settle its width iteratively.
    offset = 0
    for _ in range(4):
        header = base + f"file: . {offset}\nEND\n"
        if len(header) == offset:
            break
        offset = len(header)
    header = base + f"file: . {offset}\nEND\n"
    if len(header) != offset:
        raise IoFailure("could not fix header offset")  # pragma: no cover
    try:
        path.write_bytes(header.encode("ascii") + body)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
