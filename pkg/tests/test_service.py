"""HTTP service: queue order, leases, verdict handling, report equality."""

import json

import pytest
from fastapi.testclient import TestClient

from fixture_dataset import build_dataset

from dmriqc.io import load_ledger
from dmriqc.model import load_graph
from dmriqc.propagation import aggregate, report_csv_bytes, report_records_bytes
from dmriqc.service import ServiceConfig, create_app, render_assets, write_diagnostics
from dmriqc.io.manifest import load_manifest


@pytest.fixture()
def fresh(tmp_path):
    """A private dataset copy: verdict posts must not leak across tests."""
    return build_dataset(tmp_path / "ds")


@pytest.fixture()
def unrated(tmp_path):
    return build_dataset(tmp_path / "ds0", with_ledger=False)


def make_client(ds, **overrides):
    config = ServiceConfig(
        manifest_path=ds.manifest_path,
        ledger_path=ds.ledger_path,
        bundle_dir=ds.bundle_dir,
        **overrides,
    )
    return TestClient(create_app(config))


def verdict_body(item, status="pass", uid="web-0001"):
    return {
        "entity": item["entity"],
        "node": item["node"],
        "unit": item["unit"],
        "status": status,
        "rater_id": "raterX",
        "timestamp": "2026-08-01T12:00:00+00:00",
        "checklist": {c: True for c in item["criteria"]},
        "comment": None,
        "verdict_uid": uid,
    }


def test_queue_starts_with_first_prequal_item(unrated):
    client = make_client(unrated)
    r = client.get("/api/queue/next", params={"rater": "r1"})
    assert r.status_code == 200
    item = r.json()
    assert item["item_id"] == "scan01.PreQual"
    assert item["node"] == "PreQual"
    assert item["dependency_statuses"] == {}
    assert item["lease"]["rater_id"] == "r1"


def test_second_rater_gets_different_item(unrated):
    client = make_client(unrated)
    a = client.get("/api/queue/next", params={"rater": "r1"}).json()
    b = client.get("/api/queue/next", params={"rater": "r2"}).json()
    assert a["item_id"] != b["item_id"]
    assert b["item_id"] == "scan02.PreQual"


def test_same_rater_keeps_their_item(unrated):
    client = make_client(unrated)
    a = client.get("/api/queue/next", params={"rater": "r1"}).json()
    again = client.get("/api/queue/next", params={"rater": "r1"}).json()
    assert again["item_id"] == a["item_id"]


def test_lease_expiry_reserves_item(unrated):
    client = make_client(unrated, lease_minutes=1e-9)
    a = client.get("/api/queue/next", params={"rater": "r1"}).json()
    b = client.get("/api/queue/next", params={"rater": "r2"}).json()
    assert b["item_id"] == a["item_id"]


def test_verdict_roundtrip_and_replay(unrated):
    client = make_client(unrated)
    item = client.get("/api/queue/next", params={"rater": "r1"}).json()
    body = verdict_body(item)
    r = client.post(f"/api/items/{item['item_id']}/verdict", json=body)
    assert r.status_code == 201
    # Replay with the same uid: acknowledged, not duplicated.
    r2 = client.post(f"/api/items/{item['item_id']}/verdict", json=body)
    assert r2.status_code == 200
    ledger = load_ledger(unrated.ledger_path)
    assert len([v for v in ledger.verdicts if v.verdict_uid == "web-0001"]) == 1
    # The queue moved on.
    nxt = client.get("/api/queue/next", params={"rater": "r1"}).json()
    assert nxt["item_id"] != item["item_id"]


def test_verdict_unit_on_global_node_is_409(unrated):
    client = make_client(unrated)
    item = client.get("/api/queue/next", params={"rater": "r1"}).json()
    r = client.post(f"/api/items/{item['item_id']}.AF_right/verdict", json={})
    assert r.status_code == 409


def test_verdict_unknown_item_404(unrated):
    client = make_client(unrated)
    r = client.post("/api/items/scan99.PreQual/verdict", json={})
    assert r.status_code == 404
    r = client.post("/api/items/scan01.NoSuchNode/verdict", json={})
    assert r.status_code == 404


def test_verdict_schema_error_422(unrated):
    client = make_client(unrated)
    item = client.get("/api/queue/next", params={"rater": "r1"}).json()
    bad = verdict_body(item)
    bad["status"] = "maybe"
    r = client.post(f"/api/items/{item['item_id']}/verdict", json=bad)
    assert r.status_code == 422


def test_verdict_item_mismatch_409(unrated):
    client = make_client(unrated)
    item = client.get("/api/queue/next", params={"rater": "r1"}).json()
    body = verdict_body(item)
    body["node"] = "SLANT"
    r = client.post(f"/api/items/{item['item_id']}/verdict", json=body)
    assert r.status_code == 409


def test_dependency_statuses_cover_ancestors(fresh):
    client = make_client(fresh)
    r = client.get("/api/items/scan03.BRAID")
    assert r.status_code == 200
    deps = r.json()["dependency_statuses"]
    assert set(deps) == {"PreQual", "SLANT", "TensorAtlas"}
    assert deps["TensorAtlas"] == "fail"
    assert deps["PreQual"] == "pass"


def test_per_unit_items_and_rollup(fresh):
    client = make_client(fresh)
    r = client.get("/api/items/scan05.Tractseg.AF_right")
    assert r.status_code == 200
    assert r.json()["unit"] == "AF_right"
    assert r.json()["own_status"] == "fail"  # authored plan
    r2 = client.get("/api/items/scan05.Tractseg.NOPE")
    assert r2.status_code == 404


def test_own_status_none_when_unrated(unrated):
    client = make_client(unrated)
    r = client.get("/api/items/scan01.PreQual")
    assert r.json()["own_status"] is None


def test_report_matches_offline_aggregate(fresh):
    client = make_client(fresh)
    graph = load_graph(fresh.graph_path)
    manifest = load_manifest(fresh.manifest_path)
    ledger = load_ledger(fresh.ledger_path)
    report = aggregate(graph, ledger.verdicts, manifest.entities)
    api = client.get("/api/report")
    assert api.content == report_records_bytes(report)
    api_csv = client.get("/api/report", params={"format": "csv"})
    assert api_csv.content == report_csv_bytes(report)


def test_empty_ledger_reports_all_pending(unrated):
    client = make_client(unrated)
    doc = json.loads(client.get("/api/report").content)
    for group in doc["groups"]:
        assert group["rated"] == 0
        assert group["counts"]["pending"] == 10


def test_report_shifts_only_affected_rows(unrated):
    client = make_client(unrated)
    before = json.loads(client.get("/api/report").content)
    item = client.get("/api/queue/next", params={"rater": "r1"}).json()
    client.post(f"/api/items/{item['item_id']}/verdict", json=verdict_body(item))
    after = json.loads(client.get("/api/report").content)
    changed = [
        (b["node"], b["unit"])
        for b, a in zip(before["groups"], after["groups"])
        if b != a
    ]
    assert changed == [("PreQual", None)]


def test_graph_view_includes_criteria(fresh):
    client = make_client(fresh)
    doc = client.get("/api/graph").json()
    by_name = {n["name"]: n for n in doc["nodes"]}
    assert by_name["PreQual"]["criteria"]
    assert by_name["Tractseg"]["units"] == ["AF_right", "ATR_left", "CC_5"]
    assert by_name["BRAID"]["ancestors"] == ["PreQual", "SLANT", "TensorAtlas"]


def test_assets_served_byte_exact(fresh):
    graph = load_graph(fresh.graph_path)
    manifest = load_manifest(fresh.manifest_path)
    render_assets(manifest, graph, fresh.bundle_dir, scan_ids=["scan01"])
    write_diagnostics(manifest, graph, fresh.bundle_dir, scan_ids=["scan01"])
    client = make_client(fresh)
    item = client.get("/api/items/scan01.PreQual").json()
    assert item["assets"], "expected rendered PreQual panels"
    name = item["assets"][0]
    r = client.get(f"/api/items/scan01.PreQual/assets/{name}")
    assert r.status_code == 200
    on_disk = (fresh.bundle_dir / "scan01" / "PreQual" / name).read_bytes()
    assert r.content == on_disk
    assert client.get("/api/items/scan01.PreQual/assets/nope.png").status_code == 404
    assert item["diagnostics"], "expected diagnostics records"


def test_queue_exhaustion_gives_204(tmp_path):
    ds = build_dataset(tmp_path / "ds204")
    client = make_client(ds)
    rater = {"rater": "solo"}
    seen = []
    while True:
        r = client.get("/api/queue/next", params=rater)
        if r.status_code == 204:
            break
        item = r.json()
        seen.append(item["item_id"])
        body = verdict_body(item, uid=f"fill-{len(seen):04d}")
        assert client.post(f"/api/items/{item['item_id']}/verdict", json=body).status_code == 201
    # The authored ledger left these unrated: 9 scans x Tractseg x 3 units
    # minus the rated ones, plus assorted node gaps.
    assert len(seen) == len(set(seen))
    assert client.get("/api/queue/next", params=rater).status_code == 204


def test_token_auth(fresh):
    client = make_client(fresh, token="sekrit")
    assert client.get("/api/report").status_code == 401
    ok = client.get("/api/report", headers={"Authorization": "Bearer sekrit"})
    assert ok.status_code == 200
