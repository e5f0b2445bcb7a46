"""HTTP review service.

Endpoints (JSON request/response bodies unless noted):

    GET  /api/queue/next?rater=R      next unrated item, leased to R; 204 when done
    POST /api/items/{id}/verdict      append a verdict (201; replay of a uid: 200)
    GET  /api/items/{id}/assets/{name}  PNG bytes
    GET  /api/report                  aggregate report (?format=csv for the table)
    GET  /api/graph                   dependency graph with criteria
    GET  /api/items/{id}              re-fetch one item (console deep links)

Reports are computed from a fresh ledger snapshot per request and the
byte encoding is shared with the CLI, so the two can never disagree.
A single optional bearer token guards everything under /api.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import QcError, SchemaViolation, UnknownNode, UnknownUnit
from ..io.ledger import append_verdict, load_ledger
from ..io.manifest import DatasetManifest, load_manifest
from ..model.graph import DependencyGraph, load_graph
from ..model.verdicts import QcVerdict, latest_verdicts
from ..propagation import aggregate, report_csv_bytes, report_records_bytes
from .bundle import bundle_scan_dir, list_assets, load_diagnostics
from .queue import (
    ItemKey,
    LeaseTable,
    build_items,
    dependency_statuses,
    next_unrated,
    parse_item_id,
)


@dataclass
class ServiceConfig:
    manifest_path: Path
    ledger_path: Path
    bundle_dir: Path | None = None
    token: str | None = None
    lease_minutes: float = 15.0
    frontend_dir: Path | None = None

    def __post_init__(self):
        if self.lease_minutes <= 0:
            raise ValueError("lease duration must be positive")


class QcService:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.manifest: DatasetManifest = load_manifest(config.manifest_path)
        self.graph: DependencyGraph = load_graph(self.manifest.graph_path)
        self.items = build_items(self.graph, self.manifest)
        self.leases = LeaseTable(config.lease_minutes * 60.0)
        self.bundle_dir = Path(config.bundle_dir) if config.bundle_dir else None
        ledger = load_ledger(config.ledger_path)
        self._seen_uids = {v.verdict_uid for v in ledger.verdicts}

    def snapshot(self):
        return load_ledger(self.config.ledger_path).verdicts

    def item_payload(self, key: ItemKey, lease: tuple[str, str] | None) -> dict:
        verdicts = latest_verdicts(self.snapshot())
        assets = []
        diagnostics = []
        if self.bundle_dir is not None:
            assets = list_assets(self.bundle_dir, key.entity.scan_id, key.node)
            if key.unit is not None:
                assets = [a for a in assets if f"_{key.unit}_" in a or f"_{key.unit}." in a]
            records = load_diagnostics(self.bundle_dir, key.entity.scan_id, key.node)
            diagnostics = [r for r in records if r["unit"] in (None, key.unit)]
        node = self.graph.node(key.node)
        own = verdicts.get((key.entity, key.node, key.unit))
        return {
            "item_id": key.item_id,
            "entity": key.entity.to_dict(),
            "node": key.node,
            "unit": key.unit,
            "criteria": list(node.criteria),
            "assets": assets,
            "diagnostics": diagnostics,
            "dependency_statuses": dependency_statuses(
                self.graph, verdicts, key.entity, key.node
            ),
            "own_status": own.status.value if own is not None else None,
            "lease": {"rater_id": lease[0], "expires": lease[1]} if lease else None,
        }


def _unauthorized() -> Response:
    return JSONResponse({"error": "missing or invalid token"}, status_code=401)


def create_app(config: ServiceConfig) -> FastAPI:
    service = QcService(config)
    app = FastAPI(title="dmriqc review service", docs_url=None, redoc_url=None)
    app.state.service = service

    # The rater console may be served from another origin during development.
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def authorized(request: Request) -> bool:
        if config.token is None:
            return True
        header = request.headers.get("authorization", "")
        return header == f"Bearer {config.token}"

    @app.get("/api/queue/next")
    def queue_next(request: Request, rater: str = "anonymous"):
        if not authorized(request):
            return _unauthorized()
        verdicts = latest_verdicts(service.snapshot())
        key = next_unrated(service.items, verdicts, service.leases, rater)
        if key is None:
            return Response(status_code=204)
        service.leases.claim(key.item_id, rater)
        import datetime

        expiry = (
            datetime.datetime.now(datetime.timezone.utc)
            + datetime.timedelta(minutes=config.lease_minutes)
        ).isoformat()
        return JSONResponse(service.item_payload(key, (rater, expiry)))

    @app.get("/api/items/{item_id}")
    def get_item(item_id: str, request: Request):
        if not authorized(request):
            return _unauthorized()
        try:
            key = parse_item_id(item_id, service.graph, service.manifest)
        except (KeyError, UnknownNode, UnknownUnit):
            return JSONResponse({"error": f"unknown item {item_id!r}"}, status_code=404)
        return JSONResponse(service.item_payload(key, None))

    @app.post("/api/items/{item_id}/verdict")
    async def post_verdict(item_id: str, request: Request):
        if not authorized(request):
            return _unauthorized()
        try:
            key = parse_item_id(item_id, service.graph, service.manifest)
        except KeyError:
            return JSONResponse({"error": f"unknown item {item_id!r}"}, status_code=404)
        except UnknownNode:
            return JSONResponse({"error": f"unknown item {item_id!r}"}, status_code=404)
        except UnknownUnit as exc:
            return JSONResponse({"error": str(exc)}, status_code=409)
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"error": "body is not valid JSON"}, status_code=422)
        try:
            verdict = QcVerdict.from_dict(body)
        except SchemaViolation as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        if (
            verdict.entity != key.entity
            or verdict.node != key.node
            or verdict.unit != key.unit
        ):
            return JSONResponse(
                {"error": "verdict does not match the item's scan/node/unit"},
                status_code=409,
            )
        if verdict.verdict_uid in service._seen_uids:
            return JSONResponse({"status": "duplicate", "verdict_uid": verdict.verdict_uid})
        append_verdict(config.ledger_path, verdict)
        service._seen_uids.add(verdict.verdict_uid)
        service.leases.release(key.item_id)
        return JSONResponse(
            {"status": "recorded", "verdict_uid": verdict.verdict_uid}, status_code=201
        )

    @app.get("/api/items/{item_id}/assets/{name}")
    def get_asset(item_id: str, name: str, request: Request):
        if not authorized(request):
            return _unauthorized()
        try:
            key = parse_item_id(item_id, service.graph, service.manifest)
        except (KeyError, UnknownNode, UnknownUnit):
            return JSONResponse({"error": f"unknown item {item_id!r}"}, status_code=404)
        if service.bundle_dir is None:
            return JSONResponse({"error": "no bundle directory configured"}, status_code=404)
        if name not in list_assets(service.bundle_dir, key.entity.scan_id, key.node):
            return JSONResponse({"error": f"unknown asset {name!r}"}, status_code=404)
        path = bundle_scan_dir(service.bundle_dir, key.entity.scan_id, key.node) / name
        return Response(
            content=path.read_bytes(),
            media_type="image/png",
            headers={"Cache-Control": "public, max-age=31536000, immutable"},
        )

    @app.get("/api/report")
    def get_report(request: Request, format: str = "records"):
        if not authorized(request):
            return _unauthorized()
        report = aggregate(service.graph, service.snapshot(), service.manifest.entities)
        if format == "csv":
            return Response(content=report_csv_bytes(report), media_type="text/csv")
        return Response(
            content=report_records_bytes(report), media_type="application/json"
        )

    @app.get("/api/graph")
    def get_graph(request: Request):
        if not authorized(request):
            return _unauthorized()
        return JSONResponse(service.graph.to_dict())

    @app.exception_handler(QcError)
    def qc_error_handler(request: Request, exc: QcError):  # pragma: no cover
        return JSONResponse({"error": str(exc)}, status_code=500)

    if config.frontend_dir is not None and Path(config.frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(config.frontend_dir), html=True), name="console")

    return app
