"""Pipeline dependency graph.

Nodes are named processing steps; edges point from a node to the steps it
depends on. QC verdicts propagate along the transitive closure of these
edges, so the graph must be a DAG. Node order everywhere in the package is
the deterministic topological order computed here (dependency-first, ties
broken lexicographically).

Graph definition file (YAML)::

    nodes:
      - name: PreQual
        deps: []
        criteria:
          - "Median volume intensity decays with b-value"
        checks: [intensity_decay, motion]
        artifacts: [dwi, bval, bvec]
      - name: Tractseg
        deps: [PreQual]
        units: [AF_left, AF_right]   # presence makes the node per-unit
        criteria: [...]

`units`, `criteria`, `checks` and `artifacts` are optional and default to
empty. `checks` names diagnostics to run for the node; `artifacts` names
the manifest artifact kinds the node requires.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import (
    CycleDetected,
    DuplicateNode,
    GraphError,
    SchemaViolation,
    UnknownDependency,
    UnknownNode,
    UnknownUnit,
)
from .entities import validate_id


@dataclass(frozen=True)
class PipelineNode:
    name: str
    deps: tuple[str, ...] = ()
    units: tuple[str, ...] = ()  # empty = global granularity
    criteria: tuple[str, ...] = ()
    checks: tuple[str, ...] = ()
    artifacts: tuple[str, ...] = ()

    @property
    def per_unit(self) -> bool:
        return bool(self.units)

    def __post_init__(self):
        validate_id(self.name, "node name")
        seen = set()
        for u in self.units:
            validate_id(u, "unit name")
            if u in seen:
                raise GraphError(f"node {self.name}: duplicate unit {u!r}")
            seen.add(u)


class DependencyGraph:
    """Validated DAG of pipeline nodes with precomputed ancestor closures."""

    def __init__(self, nodes: dict[str, PipelineNode], order: list[str]):
        self.nodes = nodes
        self.order = order  # deterministic topological order
        self._ancestors: dict[str, frozenset[str]] = {}
        for name in order:
            anc: set[str] = set()
            for dep in nodes[name].deps:
                anc.add(dep)
                anc.update(self._ancestors[dep])
            self._ancestors[name] = frozenset(anc)

    def __contains__(self, name: str) -> bool:
        return name in self.nodes

    def node(self, name: str) -> PipelineNode:
        try:
            return self.nodes[name]
        except KeyError:
            raise UnknownNode(f"unknown node {name!r}") from None

    def ancestors(self, name: str) -> frozenset[str]:
        if name not in self.nodes:
            raise UnknownNode(f"unknown node {name!r}")
        return self._ancestors[name]

    def ancestors_in_order(self, name: str) -> list[str]:
        """Ancestors sorted by the graph's topological order."""
        anc = self.ancestors(name)
        return [n for n in self.order if n in anc]

    def units_of(self, name: str) -> tuple[str, ...]:
        return self.node(name).units

    def require_unit(self, name: str, unit: str | None) -> None:
        node = self.node(name)
        if node.per_unit:
            if unit is None:
                raise UnknownUnit(f"node {name!r} is per-unit; a unit is required")
            if unit not in node.units:
                raise UnknownUnit(f"node {name!r} has no unit {unit!r}")
        elif unit is not None:
            raise UnknownUnit(f"node {name!r} is global; got unit {unit!r}")

    def to_dict(self) -> dict:
        return {
            "order": list(self.order),
            "nodes": [
                {
                    "name": n.name,
                    "deps": list(n.deps),
                    "units": list(n.units),
                    "criteria": list(n.criteria),
                    "checks": list(n.checks),
                    "artifacts": list(n.artifacts),
                    "ancestors": sorted(self._ancestors[n.name]),
                }
                for n in (self.nodes[name] for name in self.order)
            ],
        }


def build_graph(defs: list[PipelineNode]) -> DependencyGraph:
    """Validate node definitions and fix the deterministic node order.

    Raises DuplicateNode, UnknownDependency or CycleDetected. The order is
    topological with lexicographic tie-breaking, so it is unique for a
    given definition set.
    """
    if not defs:
        raise GraphError("graph needs at least one node")
    nodes: dict[str, PipelineNode] = {}
    for d in defs:
        if d.name in nodes:
            raise DuplicateNode(f"duplicate node {d.name!r}")
        nodes[d.name] = d
    for d in defs:
        for dep in d.deps:
            if dep not in nodes:
                raise UnknownDependency(f"node {d.name!r} depends on unknown {dep!r}")

    # Kahn's algorithm with a sorted frontier gives the lexicographic
    # tie-break for free.
    remaining_deps = {n.name: set(n.deps) for n in defs}
    dependents: dict[str, set[str]] = {n.name: set() for n in defs}
    for n in defs:
        for dep in n.deps:
            dependents[dep].add(n.name)
    frontier = sorted(name for name, deps in remaining_deps.items() if not deps)
    order: list[str] = []
    while frontier:
        name = frontier.pop(0)
        order.append(name)
        newly_free = []
        for child in dependents[name]:
            remaining_deps[child].discard(name)
            if not remaining_deps[child]:
                newly_free.append(child)
        if newly_free:
            frontier = sorted(frontier + newly_free)
    if len(order) < len(nodes):
        raise CycleDetected(_find_cycle(nodes, set(nodes) - set(order)))
    return DependencyGraph(nodes, order)


def _find_cycle(nodes: dict[str, PipelineNode], stuck: set[str]) -> list[str]:
    """Walk dep edges inside the stuck set until a node repeats."""
    start = sorted(stuck)[0]
    path = [start]
    seen = {start}
    cur = start
    while True:
        nxt = sorted(d for d in nodes[cur].deps if d in stuck)[0]
        if nxt in seen:
            return path[path.index(nxt):] + [nxt]
        path.append(nxt)
        seen.add(nxt)
        cur = nxt


def ancestors(graph: DependencyGraph, node: str) -> frozenset[str]:
    """Transitive dependency closure of *node*, excluding the node itself."""
    return graph.ancestors(node)


def _str_list(raw, what: str) -> tuple[str, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
        raise SchemaViolation(f"{what} must be a list of strings, got {raw!r}")
    return tuple(raw)


def load_graph(path: str | Path) -> DependencyGraph:
    """Load and validate a graph definition YAML file."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise SchemaViolation(f"{path}: invalid YAML: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid UTF-8: {exc}") from exc
    return graph_from_dict(raw, source=str(path))


def graph_from_dict(raw, source: str = "<graph>") -> DependencyGraph:
    if not isinstance(raw, dict) or "nodes" not in raw:
        raise SchemaViolation(f"{source}: expected a mapping with a 'nodes' list")
    if not isinstance(raw["nodes"], list):
        raise SchemaViolation(f"{source}: 'nodes' must be a list")
    defs = []
    for entry in raw["nodes"]:
        if not isinstance(entry, dict) or "name" not in entry:
            raise SchemaViolation(f"{source}: node entries need a 'name'")
        unknown = set(entry) - {"name", "deps", "units", "criteria", "checks", "artifacts"}
        if unknown:
            raise SchemaViolation(f"{source}: unknown node keys {sorted(unknown)}")
        try:
            defs.append(
                PipelineNode(
                    name=entry["name"],
                    deps=_str_list(entry.get("deps"), "deps"),
                    units=_str_list(entry.get("units"), "units"),
                    criteria=_str_list(entry.get("criteria"), "criteria"),
                    checks=_str_list(entry.get("checks"), "checks"),
                    artifacts=_str_list(entry.get("artifacts"), "artifacts"),
                )
            )
        except (ValueError, GraphError) as exc:
            raise SchemaViolation(f"{source}: {exc}") from exc
    return build_graph(defs)


def default_graph_path() -> Path:
    return Path(__file__).resolve().parent.parent / "config" / "pipeline_graph.yaml"


def load_default_graph() -> DependencyGraph:
    return load_graph(default_graph_path())
