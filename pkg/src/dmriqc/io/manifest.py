"""Dataset manifest: the single source of truth for artifact discovery.

JSON document::

    {
      "graph": "pipeline_graph.yaml",
      "scans": [
        {
          "subject_id": "sub01", "session_id": "ses01", "scan_id": "scan001",
          "artifacts": {
            "PreQual": {"dwi": "sub01/dwi.nii.gz", "bval": "...", "bvec": "..."},
            "Tractseg": {"bundle_AF_right": "sub01/AF_right.tck"}
          }
        }
      ]
    }

Paths are relative to the manifest's directory. Validation resolves every
declared path and cross-checks each node's required artifact kinds (from
the graph definition) against what the manifest provides.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    DuplicateScanId,
    MissingArtifact,
    SchemaViolation,
    UnknownNodeReference,
)
from ..model.entities import EntityRef
from ..model.graph import DependencyGraph


@dataclass
class DatasetManifest:
    root: Path
    graph_path: Path
    entities: list[EntityRef]
    # scan_id -> node -> kind -> absolute path
    artifacts: dict[str, dict[str, dict[str, Path]]] = field(default_factory=dict)

    def artifact(self, scan_id: str, node: str, kind: str) -> Path | None:
        return self.artifacts.get(scan_id, {}).get(node, {}).get(kind)

    def entity(self, scan_id: str) -> EntityRef:
        for e in self.entities:
            if e.scan_id == scan_id:
                return e
        raise KeyError(scan_id)


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path).resolve()
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: invalid JSON: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise SchemaViolation(f"{path}: not valid UTF-8: {exc}") from exc
    except OSError as exc:
        raise SchemaViolation(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaViolation(f"{path}: manifest must be a JSON object")
    if not isinstance(raw.get("graph"), str):
        raise SchemaViolation(f"{path}: 'graph' must be a path string")
    if not isinstance(raw.get("scans"), list):
        raise SchemaViolation(f"{path}: 'scans' must be a list")

    root = path.parent
    entities: list[EntityRef] = []
    artifacts: dict[str, dict[str, dict[str, Path]]] = {}
    seen: set[str] = set()
    for i, scan in enumerate(raw["scans"]):
        if not isinstance(scan, dict):
            raise SchemaViolation(f"{path}: scans[{i}] must be an object")
        try:
            entity = EntityRef(
                subject_id=scan["subject_id"],
                session_id=scan["session_id"],
                scan_id=scan["scan_id"],
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaViolation(f"{path}: scans[{i}]: {exc}") from exc
        if entity.scan_id in seen:
            raise DuplicateScanId(f"{path}: duplicate scan_id {entity.scan_id!r}")
        seen.add(entity.scan_id)
        entities.append(entity)

        node_map: dict[str, dict[str, Path]] = {}
        arts = scan.get("artifacts", {})
        if not isinstance(arts, dict):
            raise SchemaViolation(f"{path}: scans[{i}].artifacts must be an object")
        for node, kinds in arts.items():
            if not isinstance(kinds, dict):
                raise SchemaViolation(f"{path}: scans[{i}].artifacts[{node!r}] must be an object")
            kind_map: dict[str, Path] = {}
            for kind, rel in kinds.items():
                if not isinstance(rel, str):
                    raise SchemaViolation(
                        f"{path}: scans[{i}].artifacts[{node!r}][{kind!r}] must be a path string"
                    )
                kind_map[kind] = (root / rel).resolve()
            node_map[node] = kind_map
        artifacts[entity.scan_id] = node_map

    return DatasetManifest(
        root=root,
        graph_path=(root / raw["graph"]).resolve(),
        entities=entities,
        artifacts=artifacts,
    )


def validate_manifest(manifest: DatasetManifest, graph: DependencyGraph) -> None:
    """Check node references, required artifact kinds, and path existence."""
    missing: list[tuple[str, str, str, str]] = []
    for scan_id, node_map in manifest.artifacts.items():
        for node in node_map:
            if node not in graph:
                raise UnknownNodeReference(
                    f"scan {scan_id}: artifacts reference unknown node {node!r}"
                )
        for node_name in graph.order:
            node = graph.node(node_name)
            declared = node_map.get(node_name, {})
            for kind in node.artifacts:
                p = declared.get(kind)
                if p is None or not p.exists():
                    missing.append((scan_id, node_name, kind, str(p or "<undeclared>")))
        for node_name, kinds in node_map.items():
            for kind, p in kinds.items():
                if not p.exists():
                    entry = (scan_id, node_name, kind, str(p))
                    if entry not in missing:
                        missing.append(entry)
    if missing:
        raise MissingArtifact(missing)
