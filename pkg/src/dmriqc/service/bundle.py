"""Per-scan QC bundle: diagnostics records and rendered panels on disk.

Layout under the bundle root::

    <root>/<scan_id>/<node>/diagnostics.json
    <root>/<scan_id>/<node>/<scan>_<node>_<panel>.png

Both writers are pure functions of the manifest artifacts, so re-running
them produces byte-identical output; existing outputs are skipped unless
forced.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..diagnostics import (
    DEFAULT_THRESHOLDS,
    DiagnosticResult,
    Flag,
    Thresholds,
    check_bundle,
    check_bvec_permutation,
    check_connectome,
    check_freewater,
    check_intensity_decay,
    check_motion,
    check_outlier_slices,
    check_overlay_alignment,
)
from ..dwi import (
    DwiSeries,
    auto_mask,
    chi_square_slices,
    fit_tensor,
    scalar_maps,
)
from ..errors import DiagnosticError, FitError, QcError
from ..io import (
    read_gradients,
    read_matrix_csv,
    read_motion_params,
    read_nifti,
    read_outlier_map,
    read_tck,
)
from ..io.manifest import DatasetManifest
from ..model.graph import DependencyGraph
from ..render import (
    RenderSpec,
    render_comparison,
    render_connectome,
    render_label_overlay,
    render_montage,
    render_tensor_glyphs,
    write_png,
)


def bundle_scan_dir(root: Path, scan_id: str, node: str) -> Path:
    return Path(root) / scan_id / node


def _load_series(manifest: DatasetManifest, scan_id: str, node: str) -> DwiSeries:
    dwi = read_nifti(manifest.artifact(scan_id, node, "dwi"))
    table = read_gradients(
        manifest.artifact(scan_id, node, "bval"),
        manifest.artifact(scan_id, node, "bvec"),
    )
    return DwiSeries(voxels=dwi.data, voxel_size=dwi.voxel_sizes, gradients=table)


def _chi_square_summary(series: DwiSeries, thresholds: Thresholds) -> DiagnosticResult:
    """Advisory wrapper over the slice chi-square table.

    Flags localized reconstruction error: a slice whose mean chi-square
    towers over the typical slice suggests slice-wise corruption.
    """
    mask = auto_mask(series)
    fit = fit_tensor(series, mask)
    table = chi_square_slices(series, fit, mask)
    present = table.slice_mean[table.present_slices()]
    if present.size == 0:
        raise DiagnosticError("no masked slices for chi-square")
    max_mean = float(present.max())
    median_mean = float(np.median(present))
    ratio = max_mean / median_mean if median_mean > 0 else (0.0 if max_mean == 0 else 1e9)
    metrics = {
        "max_slice_mean": max_mean,
        "median_slice_mean": median_mean,
        "max_over_median": ratio,
        "n_slices": float(present.size),
    }
    if ratio > thresholds.chi_ratio_max:
        flag = Flag.FAIL
        details = f"slice chi-square peaks at {ratio:.1f}x the median slice"
    else:
        flag, details = Flag.OK, "reconstruction error is not slice-localized"
    return DiagnosticResult(
        check_name="chi_square", metrics=metrics, flag=flag, details=details,
        thresholds_version=thresholds.version,
    )


def _error_result(name: str, exc: Exception, thresholds: Thresholds) -> DiagnosticResult:
    return DiagnosticResult(
        check_name=name,
        metrics={},
        flag=Flag.FAIL,
        details=f"check could not run: {exc}",
        thresholds_version=thresholds.version,
    )


def run_node_diagnostics(
    manifest: DatasetManifest,
    graph: DependencyGraph,
    scan_id: str,
    node_name: str,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> list[dict]:
    """Run the node's configured checks against available artifacts.

    Returns bundle records: result dicts with a `unit` key (None for
    global checks). Checks whose inputs are not in the manifest are
    skipped; checks that raise produce an advisory failure record.
    """
    node = graph.node(node_name)
    art = lambda kind: manifest.artifact(scan_id, node_name, kind)  # noqa: E731
    records: list[dict] = []

    def add(result: DiagnosticResult, unit: str | None = None) -> None:
        records.append({"unit": unit, **result.to_dict()})

    for check in node.checks:
        try:
            if check == "intensity_decay":
                if art("dwi") and art("bval") and art("bvec"):
                    add(check_intensity_decay(_load_series(manifest, scan_id, node_name), thresholds))
            elif check == "motion":
                if art("motion"):
                    add(check_motion(read_motion_params(art("motion")), thresholds))
            elif check == "outlier_slices":
                if art("outliers"):
                    add(check_outlier_slices(read_outlier_map(art("outliers")), thresholds))
            elif check == "chi_square":
                if art("dwi") and art("bval") and art("bvec"):
                    add(_chi_square_summary(_load_series(manifest, scan_id, node_name), thresholds))
            elif check == "bvec_permutation":
                if art("dwi") and art("bval") and art("bvec"):
                    series = _load_series(manifest, scan_id, node_name)
                    add(check_bvec_permutation(series, thresholds=thresholds))
            elif check == "overlay_alignment":
                if art("fa") and art("atlas_labels") and art("brain_mask"):
                    add(
                        check_overlay_alignment(
                            read_nifti(art("fa")).data,
                            read_nifti(art("atlas_labels")).data.astype(np.int64),
                            read_nifti(art("brain_mask")).data > 0.5,
                            thresholds,
                        )
                    )
            elif check == "freewater":
                if art("fa") and art("fa_fw") and art("wm_mask") and art("nonwm_mask"):
                    add(
                        check_freewater(
                            read_nifti(art("fa")).data,
                            read_nifti(art("fa_fw")).data,
                            read_nifti(art("wm_mask")).data > 0.5,
                            read_nifti(art("nonwm_mask")).data > 0.5,
                            thresholds,
                        )
                    )
            elif check == "bundle":
                for unit in node.units:
                    p = art(f"bundle_{unit}")
                    if p:
                        try:
                            add(check_bundle(read_tck(p), thresholds), unit)
                        except QcError as exc:
                            add(_error_result("bundle", exc, thresholds), unit)
            elif check == "connectome":
                if art("nos") and art("fa_matrix"):
                    add(
                        check_connectome(
                            read_matrix_csv(art("nos")),
                            read_matrix_csv(art("fa_matrix")),
                            thresholds,
                        )
                    )
            else:
                raise DiagnosticError(f"unknown check {check!r} configured on {node_name}")
        except (DiagnosticError, FitError, QcError) as exc:
            if check == "bundle":
                continue  # per-unit errors already recorded
            add(_error_result(check, exc, thresholds))

    records.sort(key=lambda r: (r["unit"] or "", r["check_name"]))
    return records


def diagnostics_json_bytes(scan_id: str, node: str, records: list[dict]) -> bytes:
    doc = {"scan_id": scan_id, "node": node, "results": records}
    return (
        json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"
    ).encode("utf-8")


def write_diagnostics(
    manifest: DatasetManifest,
    graph: DependencyGraph,
    root: str | Path,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    force: bool = False,
    scan_ids: list[str] | None = None,
) -> list[Path]:
    """Write diagnostics.json for every (scan, node); returns written paths."""
    root = Path(root)
    written = []
    for entity in manifest.entities:
        if scan_ids and entity.scan_id not in scan_ids:
            continue
        for node_name in graph.order:
            out_dir = bundle_scan_dir(root, entity.scan_id, node_name)
            out = out_dir / "diagnostics.json"
            if out.exists() and not force:
                continue
            records = run_node_diagnostics(manifest, graph, entity.scan_id, node_name, thresholds)
            out_dir.mkdir(parents=True, exist_ok=True)
            out.write_bytes(diagnostics_json_bytes(entity.scan_id, node_name, records))
            written.append(out)
    return written


def load_diagnostics(root: Path, scan_id: str, node: str) -> list[dict]:
    path = bundle_scan_dir(root, scan_id, node) / "diagnostics.json"
    if not path.exists():
        return []
    return json.loads(path.read_text(encoding="utf-8"))["results"]


# --- panel rendering --------------------------------------------------------


def _density_volume(streamlines, voxel_mm: float = 1.0) -> np.ndarray:
    """Streamline point counts on a bounding grid (for bundle previews)."""
    pts = np.vstack([s.points for s in streamlines]) if streamlines else np.zeros((0, 3))
    if len(pts) == 0:
        return np.zeros((8, 8, 8), dtype=np.float64)
    lo = np.floor(pts.min(axis=0)) - 1
    hi = np.ceil(pts.max(axis=0)) + 2
    dims = np.maximum(((hi - lo) / voxel_mm).astype(int), 8)
    vol = np.zeros(tuple(dims), dtype=np.float64)
    idx = ((pts - lo) / voxel_mm).astype(int)
    np.add.at(vol, (idx[:, 0], idx[:, 1], idx[:, 2]), 1.0)
    return vol


def render_node_assets(
    manifest: DatasetManifest,
    graph: DependencyGraph,
    scan_id: str,
    node_name: str,
    out_dir: Path,
    force: bool = False,
) -> list[str]:
    """Write the node's review panels; returns asset file names."""
    node = graph.node(node_name)
    art = lambda kind: manifest.artifact(scan_id, node_name, kind)  # noqa: E731
    spec = RenderSpec()
    assets: list[str] = []

    def emit(panel: str, producer) -> None:
        name = f"{scan_id}_{node_name}_{panel}.png"
        path = out_dir / name
        if force or not path.exists():
            img = producer()
            out_dir.mkdir(parents=True, exist_ok=True)
            write_png(img, path)
        assets.append(name)

    if art("dwi") and art("bval") and art("bvec"):
        series = _load_series(manifest, scan_id, node_name)
        emit("b0", lambda: render_montage(series.mean_b0(), spec))
        mask = auto_mask(series)
        fit = fit_tensor(series, mask)
        maps = scalar_maps(fit)
        emit("fa", lambda: render_montage(maps.fa, spec))
        emit("glyphs", lambda: render_tensor_glyphs(fit, maps, "axial"))
    if art("t1") and art("labels"):
        emit(
            "overlay",
            lambda: render_label_overlay(
                read_nifti(art("t1")).data, read_nifti(art("labels")).data.astype(np.int64), spec
            ),
        )
    if art("fa") and art("atlas_labels"):
        emit(
            "overlay",
            lambda: render_label_overlay(
                read_nifti(art("fa")).data,
                read_nifti(art("atlas_labels")).data.astype(np.int64),
                spec,
            ),
        )
        emit("famap", lambda: render_montage(read_nifti(art("fa")).data, spec))
    if art("fa") and art("fa_fw"):
        emit(
            "compare",
            lambda: render_comparison(
                render_montage(read_nifti(art("fa")).data, spec),
                render_montage(read_nifti(art("fa_fw")).data, spec),
                ("original FA", "free-water corrected"),
            ),
        )
    if art("fa_mni") and art("template"):
        emit(
            "compare",
            lambda: render_comparison(
                render_montage(read_nifti(art("template")).data, spec),
                render_montage(read_nifti(art("fa_mni")).data, spec),
                ("template", "registered"),
            ),
        )
    if art("nos"):
        emit("nos", lambda: render_connectome(read_matrix_csv(art("nos")), "nos"))
    if art("fa_matrix"):
        emit("famat", lambda: render_connectome(read_matrix_csv(art("fa_matrix")), "fa"))
    for unit in node.units:
        p = art(f"bundle_{unit}")
        if p:
            emit(
                f"{unit}_density",
                lambda p=p: render_montage(_density_volume(read_tck(p)), RenderSpec(n_slices=4)),
            )
    return assets


def render_assets(
    manifest: DatasetManifest,
    graph: DependencyGraph,
    root: str | Path,
    force: bool = False,
    scan_ids: list[str] | None = None,
) -> dict[tuple[str, str], list[str]]:
    """Render panels for every (scan, node); returns asset names per pair."""
    root = Path(root)
    out: dict[tuple[str, str], list[str]] = {}
    for entity in manifest.entities:
        if scan_ids and entity.scan_id not in scan_ids:
            continue
        for node_name in graph.order:
            out_dir = bundle_scan_dir(root, entity.scan_id, node_name)
            names = render_node_assets(manifest, graph, entity.scan_id, node_name, out_dir, force)
            out[(entity.scan_id, node_name)] = names
    return out


def list_assets(root: Path, scan_id: str, node: str) -> list[str]:
    d = bundle_scan_dir(root, scan_id, node)
    if not d.is_dir():
        return []
    return sorted(p.name for p in d.glob("*.png"))
