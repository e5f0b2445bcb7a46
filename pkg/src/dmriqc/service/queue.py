"""Review queue: deterministic item ordering plus lease bookkeeping.

Item ids are ``<scan_id>.<node>`` or ``<scan_id>.<node>.<unit>`` (the id
alphabet forbids dots, so splitting is unambiguous). Queue order is node
topological order, then scan id, then unit order as declared, which makes
"next item" reproducible. A lease hides an item from other raters until
it expires or a verdict lands.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from ..errors import UnknownNode, UnknownUnit
from ..io.manifest import DatasetManifest
from ..model.entities import EntityRef
from ..model.graph import DependencyGraph
from ..model.verdicts import VerdictMap
from ..propagation import node_rollup


@dataclass(frozen=True)
class ItemKey:
    entity: EntityRef
    node: str
    unit: str | None

    @property
    def item_id(self) -> str:
        parts = [self.entity.scan_id, self.node]
        if self.unit is not None:
            parts.append(self.unit)
        return ".".join(parts)


def build_items(graph: DependencyGraph, manifest: DatasetManifest) -> list[ItemKey]:
    items: list[ItemKey] = []
    entities = sorted(manifest.entities, key=lambda e: e.scan_id)
    for node_name in graph.order:
        node = graph.node(node_name)
        for entity in entities:
            if node.per_unit:
                for unit in node.units:
                    items.append(ItemKey(entity, node_name, unit))
            else:
                items.append(ItemKey(entity, node_name, None))
    return items


def parse_item_id(item_id: str, graph: DependencyGraph, manifest: DatasetManifest) -> ItemKey:
    parts = item_id.split(".")
    if len(parts) not in (2, 3):
        raise KeyError(item_id)
    scan_id, node_name = parts[0], parts[1]
    unit = parts[2] if len(parts) == 3 else None
    entity = manifest.entity(scan_id)  # KeyError if unknown
    if node_name not in graph:
        raise UnknownNode(f"unknown node {node_name!r}")
    graph.require_unit(node_name, unit)  # UnknownUnit on mismatch
    return ItemKey(entity, node_name, unit)


class LeaseTable:
    def __init__(self, duration_s: float, clock=time.monotonic):
        self.duration_s = duration_s
        self._clock = clock
        self._leases: dict[str, tuple[str, float]] = {}
        self._lock = threading.Lock()

    def claim(self, item_id: str, rater: str) -> float:
        with self._lock:
            expiry = self._clock() + self.duration_s
            self._leases[item_id] = (rater, expiry)
            return expiry

    def release(self, item_id: str) -> None:
        with self._lock:
            self._leases.pop(item_id, None)

    def holder(self, item_id: str) -> str | None:
        with self._lock:
            lease = self._leases.get(item_id)
            if lease is None or lease[1] <= self._clock():
                return None
            return lease[0]

    def is_blocked(self, item_id: str, rater: str) -> bool:
        holder = self.holder(item_id)
        return holder is not None and holder != rater


def dependency_statuses(
    graph: DependencyGraph, verdicts: VerdictMap, entity: EntityRef, node: str
) -> dict[str, str | None]:
    """Ancestor name -> rolled-up status value, None while unrated."""
    out: dict[str, str | None] = {}
    for anc in graph.ancestors_in_order(node):
        status = node_rollup(graph, verdicts, entity, anc)
        out[anc] = status.value if status is not None else None
    return out


def next_unrated(
    items: list[ItemKey],
    verdicts: VerdictMap,
    leases: LeaseTable,
    rater: str,
) -> ItemKey | None:
    for key in items:
        if (key.entity, key.node, key.unit) in verdicts:
            continue
        if leases.is_blocked(key.item_id, rater):
            continue
        return key
    return None
