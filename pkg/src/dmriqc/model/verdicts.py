"""Human QC verdicts and the four-way outcome vocabulary.

A verdict records one rater's pass/fail decision for one (scan, node) pair,
or (scan, node, unit) for per-unit nodes. NotRun marks outputs the pipeline
never produced; it is stored distinctly but counts as a failure when
outcomes are classified.
"""

from __future__ import annotations

import enum
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import SchemaViolation
from .entities import EntityRef


class VerdictStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_RUN = "not_run"

    @property
    def failed(self) -> bool:
        """NotRun collapses to Fail for classification."""
        return self is not VerdictStatus.PASS


class OutcomeCategory(enum.Enum):
    BOTH_PASSED = "both_passed"
    DEP_PASSED_OUTCOME_FAILED = "dep_passed_outcome_failed"
    DEP_FAILED_OUTCOME_PASSED = "dep_failed_outcome_passed"
    BOTH_FAILED = "both_failed"
    PENDING = "pending"


CATEGORY_ORDER = [
    OutcomeCategory.BOTH_PASSED,
    OutcomeCategory.DEP_PASSED_OUTCOME_FAILED,
    OutcomeCategory.DEP_FAILED_OUTCOME_PASSED,
    OutcomeCategory.BOTH_FAILED,
    OutcomeCategory.PENDING,
]


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def parse_timestamp(value: str) -> datetime:
    # Python 3.10 fromisoformat does not accept a literal Z suffix.
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError, TypeError) as exc:
        raise SchemaViolation(f"bad timestamp {value!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


@dataclass(frozen=True)
class QcVerdict:
    entity: EntityRef
    node: str
    status: VerdictStatus
    rater_id: str
    timestamp: datetime
    unit: str | None = None
    checklist: dict[str, bool] = field(default_factory=dict)
    comment: str | None = None
    verdict_uid: str = field(default_factory=lambda: uuid.uuid4().hex)

    @property
    def key(self) -> tuple[EntityRef, str, str | None]:
        return (self.entity, self.node, self.unit)

    def to_dict(self) -> dict:
        d = {
            "entity": self.entity.to_dict(),
            "node": self.node,
            "unit": self.unit,
            "status": self.status.value,
            "rater_id": self.rater_id,
            "timestamp": self.timestamp.isoformat(),
            "checklist": dict(self.checklist),
            "comment": self.comment,
            "verdict_uid": self.verdict_uid,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QcVerdict":
        try:
            checklist = d.get("checklist") or {}
            if not isinstance(checklist, dict) or not all(
                isinstance(k, str) and isinstance(v, bool) for k, v in checklist.items()
            ):
                raise SchemaViolation(f"bad checklist {checklist!r}")
            unit = d.get("unit")
            if unit is not None and not isinstance(unit, str):
                raise SchemaViolation(f"bad unit {unit!r}")
            comment = d.get("comment")
            if comment is not None and not isinstance(comment, str):
                raise SchemaViolation(f"bad comment {comment!r}")
            uid = d["verdict_uid"]
            if not isinstance(uid, str) or not uid:
                raise SchemaViolation(f"bad verdict_uid {uid!r}")
            rater = d["rater_id"]
            if not isinstance(rater, str) or not rater:
                raise SchemaViolation(f"bad rater_id {rater!r}")
            return cls(
                entity=EntityRef.from_dict(d["entity"]),
                node=d["node"],
                unit=unit,
                status=VerdictStatus(d["status"]),
                rater_id=rater,
                timestamp=parse_timestamp(d["timestamp"]),
                checklist=checklist,
                comment=comment,
                verdict_uid=uid,
            )
        except SchemaViolation:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaViolation(f"bad verdict record: {exc}") from exc


VerdictMap = dict[tuple[EntityRef, str, str | None], QcVerdict]


def latest_verdicts(ledger: list[QcVerdict]) -> VerdictMap:
    """Last-write-wins view of a verdict sequence.

    For each (entity, node, unit) key the verdict with the greatest
    timestamp wins; equal timestamps are broken by the lexicographically
    greatest verdict_uid, so the result is order-independent.
    """
    out: VerdictMap = {}
    for v in ledger:
        cur = out.get(v.key)
        if cur is None or (v.timestamp, v.verdict_uid) > (cur.timestamp, cur.verdict_uid):
            out[v.key] = v
    return out
