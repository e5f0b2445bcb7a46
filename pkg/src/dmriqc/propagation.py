"""Outcome classification and report aggregation.

Each (scan, node[, unit]) lands in exactly one of four categories once its
own verdict and every ancestor verdict exist:

    both_passed                 own pass, all ancestors pass
    dep_passed_outcome_failed   all ancestors pass, own fail
    dep_failed_outcome_passed   own pass, at least one ancestor fail
    both_failed                 own fail, at least one ancestor fail

NotRun counts as fail. A missing verdict anywhere in the chain makes the
record pending instead; pending records are excluded from the four-way
proportions but reported separately.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import UnknownUnit
from .model.entities import EntityRef, entity_totals
from .model.graph import DependencyGraph
from .model.verdicts import (
    CATEGORY_ORDER,
    OutcomeCategory,
    QcVerdict,
    VerdictMap,
    VerdictStatus,
    latest_verdicts,
)


@dataclass(frozen=True)
class OutcomeRecord:
    entity: EntityRef
    node: str
    unit: str | None
    category: OutcomeCategory
    failing_ancestors: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "entity": self.entity.to_dict(),
            "node": self.node,
            "unit": self.unit,
            "category": self.category.value,
            "failing_ancestors": list(self.failing_ancestors),
        }


def classify(own: VerdictStatus, dep_statuses: list[VerdictStatus]) -> OutcomeCategory:
    """Four-way outcome for present verdicts; an empty dep list counts as all-pass."""
    any_dep_failed = any(d.failed for d in dep_statuses)
    if own.failed:
        return OutcomeCategory.BOTH_FAILED if any_dep_failed else OutcomeCategory.DEP_PASSED_OUTCOME_FAILED
    return OutcomeCategory.DEP_FAILED_OUTCOME_PASSED if any_dep_failed else OutcomeCategory.BOTH_PASSED


def node_rollup(
    graph: DependencyGraph, verdicts: VerdictMap, entity: EntityRef, node: str
) -> VerdictStatus | None:
    """Node-level status for dependency propagation; None when unrated.

    Per-unit nodes roll up as: fail if any unit failed or was not run,
    pass only when every declared unit passed, unrated if any unit lacks
    a verdict and none failed.
    """
    n = graph.node(node)
    if not n.per_unit:
        v = verdicts.get((entity, node, None))
        return v.status if v is not None else None
    any_missing = False
    for unit in n.units:
        v = verdicts.get((entity, node, unit))
        if v is None:
            any_missing = True
        elif v.status.failed:
            return VerdictStatus.FAIL
    return None if any_missing else VerdictStatus.PASS


def classify_scan(
    graph: DependencyGraph,
    verdicts: VerdictMap,
    entity: EntityRef,
    node: str,
    unit: str | None = None,
) -> OutcomeRecord:
    """Classify one (scan, node[, unit]) against the full ancestor closure."""
    graph.require_unit(node, unit)
    own = verdicts.get((entity, node, unit))
    anc_names = graph.ancestors_in_order(node)
    anc_statuses = [node_rollup(graph, verdicts, entity, a) for a in anc_names]
    if own is None or any(s is None for s in anc_statuses):
        return OutcomeRecord(entity, node, unit, OutcomeCategory.PENDING)
    category = classify(own.status, anc_statuses)
    failing = tuple(a for a, s in zip(anc_names, anc_statuses) if s.failed)
    return OutcomeRecord(entity, node, unit, category, failing)


@dataclass
class Report:
    """Per-(node, unit) category counts plus dataset totals."""

    graph_order: list[str]
    counts: dict[tuple[str, str | None], dict[OutcomeCategory, int]]
    totals: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[str, str | None, str, int]]:
        """Flat (node, unit, category, count) rows in deterministic order."""
        out = []
        for node, unit in sorted(self.counts, key=lambda k: (self.graph_order.index(k[0]), k[1] or "")):
            for cat in CATEGORY_ORDER:
                out.append((node, unit, cat.value, self.counts[(node, unit)].get(cat, 0)))
        return out

    def to_dict(self) -> dict:
        groups = []
        for node, unit in sorted(self.counts, key=lambda k: (self.graph_order.index(k[0]), k[1] or "")):
            cat_counts = self.counts[(node, unit)]
            rated = sum(c for cat, c in cat_counts.items() if cat is not OutcomeCategory.PENDING)
            entry = {
                "node": node,
                "unit": unit,
                "counts": {cat.value: cat_counts.get(cat, 0) for cat in CATEGORY_ORDER},
                "rated": rated,
            }
            # Proportions over non-pending records only.
            if rated:
                entry["proportions"] = {
                    cat.value: cat_counts.get(cat, 0) / rated
                    for cat in CATEGORY_ORDER
                    if cat is not OutcomeCategory.PENDING
                }
            groups.append(entry)
        return {"totals": dict(self.totals), "groups": groups}


def aggregate(
    graph: DependencyGraph, ledger: list[QcVerdict], entities: list[EntityRef]
) -> Report:
    """Classify every entity against every node (and unit) and count."""
    verdicts = latest_verdicts(ledger)
    counts: dict[tuple[str, str | None], dict[OutcomeCategory, int]] = {}
    for node_name in graph.order:
        node = graph.node(node_name)
        units: tuple[str | None, ...] = node.units if node.per_unit else (None,)
        for unit in units:
            tally: dict[OutcomeCategory, int] = {}
            for entity in entities:
                rec = classify_scan(graph, verdicts, entity, node_name, unit)
                tally[rec.category] = tally.get(rec.category, 0) + 1
            counts[(node_name, unit)] = tally
    return Report(graph_order=list(graph.order), counts=counts, totals=entity_totals(entities))


def report_records_bytes(report: Report) -> bytes:
    """Canonical machine-readable report encoding (shared by CLI and HTTP)."""
    return (
        json.dumps(report.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=True)
        + "\n"
    ).encode("utf-8")


REPORT_CSV_COLUMNS = ["node", "unit", "category", "count"]


def report_csv_bytes(report: Report) -> bytes:
    """CSV export: header then one row per (node, unit, category, count)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_CSV_COLUMNS)
    for node, unit, category, count in report.rows():
        writer.writerow([node, unit or "", category, count])
    return buf.getvalue().encode("utf-8")


def outcome_records(
    graph: DependencyGraph, ledger: list[QcVerdict], entities: list[EntityRef]
) -> list[OutcomeRecord]:
    """Every classification record, in (node order, scan, unit) order."""
    verdicts = latest_verdicts(ledger)
    records = []
    for node_name in graph.order:
        node = graph.node(node_name)
        units: tuple[str | None, ...] = node.units if node.per_unit else (None,)
        for entity in sorted(entities):
            for unit in units:
                records.append(classify_scan(graph, verdicts, entity, node_name, unit))
    return records
