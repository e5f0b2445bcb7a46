#!/usr/bin/env python3
"""Build the seeded 10-scan dataset and serve it for console tests."""

import argparse
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO_ROOT / "tests"))

from fixture_dataset import build_dataset  # noqa: E402

import uvicorn  # noqa: E402

from dmriqc.service.app import ServiceConfig, create_app  # noqa: E402
from dmriqc.service.bundle import render_assets, write_diagnostics  # noqa: E402
from dmriqc.io.manifest import load_manifest  # noqa: E402
from dmriqc.model.graph import load_graph  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--root", required=True)
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--empty-ledger", action="store_true")
    parser.add_argument("--with-bundle", action="store_true",
                        help="render scan01 panels and diagnostics first")
    args = parser.parse_args()

    ds = build_dataset(Path(args.root), with_ledger=not args.empty_ledger)
    if args.with_bundle:
        manifest = load_manifest(ds.manifest_path)
        graph = load_graph(ds.graph_path)
        render_assets(manifest, graph, ds.bundle_dir, scan_ids=["scan01"])
        write_diagnostics(manifest, graph, ds.bundle_dir, scan_ids=["scan01"])
    app = create_app(
        ServiceConfig(
            manifest_path=ds.manifest_path,
            ledger_path=ds.ledger_path,
            bundle_dir=ds.bundle_dir,
        )
    )
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
