"""Command-line entry points.

    dmriqc ingest     validate a dataset manifest against its graph
    dmriqc diagnose   run advisory checks, write per-scan QC bundles
    dmriqc render     write review panels into the QC bundle
    dmriqc serve      start the review HTTP service
    dmriqc report     print the aggregate outcome report
    dmriqc propagate  print per-scan outcome classifications

Option precedence: command-line flag, then DMRIQC_* environment variable,
then --config YAML file. Exit codes: 0 success, 2 validation failure,
1 internal error.
"""

from __future__ import annotations

import argparse
import csv as csv_mod
import io as io_mod
import json
import os
import sys
from pathlib import Path

import yaml

from .errors import ManifestError, MissingArtifact, QcError, SchemaViolation
from .io.ledger import load_ledger
from .io.manifest import load_manifest, validate_manifest
from .model.graph import load_graph
from .propagation import aggregate, outcome_records, report_csv_bytes, report_records_bytes

ENV_PREFIX = "DMRIQC_"


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise SchemaViolation(f"config file {path}: {exc}") from exc
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise SchemaViolation(f"config file {path}: expected a mapping")
    return raw


def _setting(args, name: str, config: dict, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None:
        return env
    if name in config:
        return config[name]
    return default


def _resolve_paths(args):
    config = _load_config_file(getattr(args, "config", None))
    manifest = _setting(args, "manifest", config)
    if manifest is None:
        raise SchemaViolation("no manifest given (flag --manifest, env DMRIQC_MANIFEST, or config)")
    ledger = _setting(args, "ledger", config)
    bundle = _setting(args, "bundle", config)
    if bundle is None:
        bundle = str(Path(manifest).resolve().parent / "qc_bundle")
    return config, Path(manifest), Path(ledger) if ledger else None, Path(bundle)


def _load_dataset(manifest_path: Path):
    manifest = load_manifest(manifest_path)
    graph = load_graph(manifest.graph_path)
    return manifest, graph


def cmd_ingest(args) -> int:
    _, manifest_path, _, _ = _resolve_paths(args)
    manifest, graph = _load_dataset(manifest_path)
    try:
        validate_manifest(manifest, graph)
    except MissingArtifact as exc:
        print("manifest validation failed: missing artifacts", file=sys.stderr)
        for scan, node, kind, path in exc.entries:
            print(f"  {scan} / {node} / {kind}: {path}", file=sys.stderr)
        return 2
    from .model.entities import entity_totals

    totals = entity_totals(manifest.entities)
    print(
        f"manifest ok: {totals['scans']} scans / {totals['sessions']} sessions / "
        f"{totals['subjects']} subjects; graph has {len(graph.order)} nodes"
    )
    return 0


def cmd_diagnose(args) -> int:
    from .service.bundle import write_diagnostics

    _, manifest_path, _, bundle = _resolve_paths(args)
    manifest, graph = _load_dataset(manifest_path)
    written = write_diagnostics(manifest, graph, bundle, force=args.force)
    print(f"diagnostics written: {len(written)} files under {bundle}")
    return 0


def cmd_render(args) -> int:
    from .service.bundle import render_assets

    _, manifest_path, _, bundle = _resolve_paths(args)
    manifest, graph = _load_dataset(manifest_path)
    assets = render_assets(manifest, graph, bundle, force=args.force)
    n = sum(len(v) for v in assets.values())
    print(f"panels available: {n} under {bundle}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import ServiceConfig, create_app

    config, manifest_path, ledger, bundle = _resolve_paths(args)
    if ledger is None:
        raise SchemaViolation("serve needs a ledger path (--ledger)")
    port = int(_setting(args, "port", config, 8000))
    token = _setting(args, "token", config)
    frontend = _setting(args, "frontend", config)
    app = create_app(
        ServiceConfig(
            manifest_path=manifest_path,
            ledger_path=ledger,
            bundle_dir=bundle,
            token=token,
            lease_minutes=float(_setting(args, "lease_minutes", config, 15.0)),
            frontend_dir=Path(frontend) if frontend else None,
        )
    )
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def _report(args):
    _, manifest_path, ledger, _ = _resolve_paths(args)
    if ledger is None:
        raise SchemaViolation("report needs a ledger path (--ledger)")
    manifest, graph = _load_dataset(manifest_path)
    verdicts = load_ledger(ledger)
    for warning in verdicts.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return manifest, graph, verdicts.verdicts


def cmd_report(args) -> int:
    manifest, graph, verdicts = _report(args)
    report = aggregate(graph, verdicts, manifest.entities)
    if args.format == "csv":
        sys.stdout.buffer.write(report_csv_bytes(report))
    else:
        sys.stdout.buffer.write(report_records_bytes(report))
    sys.stdout.buffer.flush()
    return 0


def cmd_propagate(args) -> int:
    manifest, graph, verdicts = _report(args)
    records = outcome_records(graph, verdicts, manifest.entities)
    if args.format == "csv":
        buf = io_mod.StringIO()
        writer = csv_mod.writer(buf, lineterminator="\n")
        writer.writerow(["scan_id", "node", "unit", "category", "failing_ancestors"])
        for r in records:
            writer.writerow(
                [r.entity.scan_id, r.node, r.unit or "", r.category.value,
                 ";".join(r.failing_ancestors)]
            )
        sys.stdout.write(buf.getvalue())
    else:
        for r in records:
            sys.stdout.write(json.dumps(r.to_dict(), sort_keys=True, separators=(",", ":")))
            sys.stdout.write("\n")
    sys.stdout.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmriqc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", help="dataset manifest JSON")
        p.add_argument("--ledger", help="verdict ledger file (JSON lines)")
        p.add_argument("--bundle", help="QC bundle directory (default: <manifest dir>/qc_bundle)")
        p.add_argument("--config", help="YAML config file with the same keys")

    p = sub.add_parser("ingest", help="validate the manifest")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("diagnose", help="run advisory checks")
    common(p)
    p.add_argument("--force", action="store_true", help="recompute existing outputs")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("render", help="write review panels")
    common(p)
    p.add_argument("--force", action="store_true", help="re-render existing outputs")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="start the review service")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--token", help="require this bearer token on /api")
    p.add_argument("--frontend", help="static directory to serve at /")
    p.add_argument("--lease-minutes", dest="lease_minutes", type=float)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="aggregate outcome report")
    common(p)
    p.add_argument("--format", choices=["records", "csv"], default="records")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("propagate", help="per-scan outcome classification")
    common(p)
    p.add_argument("--format", choices=["records", "csv"], default="records")
    p.set_defaults(func=cmd_propagate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaViolation, ManifestError, QcError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort structured message
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
