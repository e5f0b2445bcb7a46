from __future__ import annotations

import re
from dataclasses import dataclass

# Identifiers end up in file names, URLs and queue item ids, so keep them to
# a safe character set. Dots are reserved as the item-id separator.
_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


def validate_id(value: str, what: str) -> str:
    if not isinstance(value, str) or not _ID_RE.match(value):
        raise ValueError(f"invalid {what} {value!r}: must match [A-Za-z0-9_-]+")
    return value


@dataclass(frozen=True, order=True)
class EntityRef:
    """One scan within the subject/session/scan hierarchy."""

    subject_id: str
    session_id: str
    scan_id: str

    def __post_init__(self):
        validate_id(self.subject_id, "subject_id")
        validate_id(self.session_id, "session_id")
        validate_id(self.scan_id, "scan_id")

    def to_dict(self) -> dict:
        return {
            "subject_id": self.subject_id,
            "session_id": self.session_id,
            "scan_id": self.scan_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EntityRef":
        return cls(d["subject_id"], d["session_id"], d["scan_id"])


def entity_totals(entities: list[EntityRef]) -> dict:
    """Scan/session/subject counts for a set of entities.

    Scans are unique by scan_id; sessions by (subject, session) pair.
    """
    scans = {e.scan_id for e in entities}
    sessions = {(e.subject_id, e.session_id) for e in entities}
    subjects = {e.subject_id for e in entities}
    return {"scans": len(scans), "sessions": len(sessions), "subjects": len(subjects)}
