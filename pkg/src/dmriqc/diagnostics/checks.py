"""Automated advisory checks, one per reviewed failure class.

Each check is a pure function of its inputs and a Thresholds value.
Checks raise a DiagnosticError subclass when their input contract is
violated; the bundle runner converts those into advisory failures.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import ndimage, stats

from ..dwi.mask import auto_mask
from ..dwi.scalars import scalar_maps
from ..dwi.tensor import fit_tensor
from ..dwi.tracking import Streamline, mean_length_mm, seed_lattice, track_streamlines
from ..dwi.types import DwiSeries, GradientTable
from ..errors import EmptyInput, MaskEmpty, ShapeMismatch
from .results import DEFAULT_THRESHOLDS, DiagnosticResult, Flag, MotionTrace, Thresholds


def _result(name: str, metrics: dict, flag: Flag, details: str, th: Thresholds) -> DiagnosticResult:
    return DiagnosticResult(
        check_name=name, metrics=metrics, flag=flag, details=details,
        thresholds_version=th.version,
    )


def check_intensity_decay(
    series: DwiSeries, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> DiagnosticResult:
    """Shell medians must fall off with b, and roughly exponentially so."""
    if np.any(series.gradients.b0_mask):
        mask = auto_mask(series)
    else:
        # No b0 volume (single-shell oddity): same mask rule on the mean
        # of whatever volumes exist.
        mean_all = series.voxels.mean(axis=3)
        mask = mean_all > 0.10 * np.percentile(mean_all, 98.0)
    if not mask.any():
        raise MaskEmpty("auto mask is empty; cannot compute shell medians")
    shells = series.gradients.shells()
    bs = np.array([b for b, _ in shells])
    medians = np.array(
        [float(np.median(series.voxels[..., idx][mask])) for _, idx in shells]
    )
    metrics = {f"median_b{int(round(b))}": m for b, m in zip(bs, medians)}
    metrics["n_shells"] = float(len(shells))

    if len(shells) < 2:
        metrics["spearman_rho"] = 0.0
        return _result(
            "intensity_decay", metrics, Flag.WARN,
            "single shell: decay check not applicable", thresholds,
        )

    rho = stats.spearmanr(bs, medians).statistic
    rho = float(rho) if np.isfinite(rho) else 0.0
    metrics["spearman_rho"] = rho

    details = []
    flag = Flag.OK
    non_increasing = all(
        medians[i + 1] <= medians[i] * (1.0 + thresholds.decay_monotone_tol)
        for i in range(len(medians) - 1)
    )
    if rho > thresholds.decay_rho_max:
        flag = Flag.FAIL
        details.append(f"rho {rho:.3f} above {thresholds.decay_rho_max}")
    if not non_increasing:
        flag = Flag.FAIL
        details.append("shell medians are not non-increasing")

    # Exponential fit quality on ln(median); only meaningful with 3+ shells.
    r2 = 1.0
    if len(shells) >= 3 and np.all(medians > 0):
        ln_m = np.log(medians)
        coef = np.polyfit(bs, ln_m, 1)
        pred = np.polyval(coef, bs)
        ss_res = float(np.sum((ln_m - pred) ** 2))
        ss_tot = float(np.sum((ln_m - ln_m.mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    metrics["log_linear_r2"] = r2
    if flag is Flag.OK and r2 < thresholds.decay_r2_warn:
        flag = Flag.WARN
        details.append(f"log-linear R2 {r2:.3f} below {thresholds.decay_r2_warn}")

    return _result(
        "intensity_decay", metrics, flag,
        "; ".join(details) or "shell medians decay with b", thresholds,
    )


def check_motion(
    trace: MotionTrace, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> DiagnosticResult:
    """Adjacent-volume motion jumps should stay small and smooth."""
    if len(trace) < 2:
        raise EmptyInput("motion trace needs at least 2 volumes")
    dt = np.abs(np.diff(trace.translations, axis=0)).max(axis=1)  # per-axis max, mm
    dr = np.abs(np.diff(trace.rotations, axis=0)).max(axis=1)  # deg
    over = (dt > thresholds.motion_jump_mm) | (dr > thresholds.motion_jump_deg)
    frac = float(over.mean())
    metrics = {
        "max_translation_jump_mm": float(dt.max()),
        "p95_translation_jump_mm": float(np.percentile(dt, 95)),
        "max_rotation_jump_deg": float(dr.max()),
        "p95_rotation_jump_deg": float(np.percentile(dr, 95)),
        "jump_fraction": frac,
    }
    if frac > thresholds.motion_fail_fraction:
        flag, details = Flag.FAIL, f"{frac:.0%} of adjacent volumes jump too far"
    elif dt.max() > thresholds.motion_warn_single_mm:
        flag, details = Flag.WARN, f"single jump of {dt.max():.1f} mm"
    else:
        flag, details = Flag.OK, "motion is smooth between volumes"
    return _result("motion", metrics, flag, details, thresholds)


def central_band(n_slices: int, fraction: float = 0.5) -> slice:
    """Index range of the central *fraction* of the slice axis."""
    lo = int(round(n_slices * (0.5 - fraction / 2.0)))
    hi = int(round(n_slices * (0.5 + fraction / 2.0)))
    return slice(lo, max(hi, lo + 1))


def check_outlier_slices(
    outlier_map: np.ndarray, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> DiagnosticResult:
    """Imputed-slice map (volumes x slices) should be sparse away from the center."""
    om = np.asarray(outlier_map, dtype=bool)
    if om.ndim != 2 or om.size == 0:
        raise EmptyInput(f"outlier map must be a non-empty 2D matrix, got {om.shape}")
    band = central_band(om.shape[1], thresholds.outlier_central_band)
    overall = float(om.mean())
    central = float(om[:, band].mean())
    per_slice_max = float(om.mean(axis=0).max())
    metrics = {
        "overall_fraction": overall,
        "central_fraction": central,
        "max_slice_fraction": per_slice_max,
        "n_volumes": float(om.shape[0]),
        "n_slices": float(om.shape[1]),
    }
    if central > thresholds.outlier_central_fraction:
        flag, details = Flag.FAIL, f"central slices {central:.1%} imputed"
    elif overall > thresholds.outlier_overall_fraction:
        flag, details = Flag.FAIL, f"{overall:.1%} of all slices imputed"
    else:
        flag, details = Flag.OK, "imputation volume is reasonable"
    return _result("outlier_slices", metrics, flag, details, thresholds)


# --- b-vector permutation sweep -------------------------------------------

AXES = "xyz"

# Sign patterns in canonical order: fewest flips first, then left-to-right.
# The signal depends on g only through g g', so a candidate and its global
# negation always score identically; flip-count ordering makes the
# representative with fewer minus signs the tie-break winner of each pair
# (identity beats ---, the x flip -++ beats +--, and so on).
SIGN_PATTERNS = [
    (1, 1, 1),
    (-1, 1, 1),
    (1, -1, 1),
    (1, 1, -1),
    (-1, -1, 1),
    (-1, 1, -1),
    (1, -1, -1),
    (-1, -1, -1),
]


def permutation_candidates() -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """All 48 (axis order, sign pattern) candidates in canonical order.

    Identity is first; axis orders are lexicographic, sign patterns follow
    SIGN_PATTERNS. This order is the documented tie-break.
    """
    out = []
    for perm in itertools.permutations((0, 1, 2)):
        for signs in SIGN_PATTERNS:
            out.append((perm, signs))
    return out


def candidate_name(candidate) -> str:
    perm, signs = candidate
    return "".join(AXES[p] for p in perm) + ":" + "".join("+" if s > 0 else "-" for s in signs)


IDENTITY_CANDIDATE = ((0, 1, 2), (1, 1, 1))


def apply_candidate(bvecs: np.ndarray, candidate) -> np.ndarray:
    perm, signs = candidate
    out = bvecs[:, list(perm)].copy()
    out *= np.asarray(signs, dtype=np.float64)
    return out


def score_bvec_candidate(
    series: DwiSeries,
    mask: np.ndarray,
    candidate,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> float:
    """Mean streamline length when tracking under a candidate orientation."""
    g = series.gradients
    candidate_series = DwiSeries(
        voxels=series.voxels,
        voxel_size=series.voxel_size,
        gradients=GradientTable(g.bvals, apply_candidate(g.bvecs, candidate)),
    )
    fit = fit_tensor(candidate_series, mask)
    maps = scalar_maps(fit)
    seeds = seed_lattice(
        maps,
        series.voxel_size,
        fa_min=thresholds.bvec_seed_fa,
        stride=thresholds.bvec_seed_stride,
    )
    if len(seeds) == 0:
        return 0.0
    streamlines = track_streamlines(maps, seeds, series.voxel_size)
    return mean_length_mm(streamlines)


def check_bvec_permutation(
    series: DwiSeries,
    mask: np.ndarray | None = None,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> DiagnosticResult:
    """Sweep all 48 axis order/sign candidates; the stored orientation should win.

    Sign flips are only detectable on curved geometry; on a perfectly
    axis-aligned straight tract the flips of that axis tie with identity
    and the tie rule keeps identity.
    """
    if mask is None:
        mask = auto_mask(series)
    scores: dict[str, float] = {}
    best_score = -np.inf
    for cand in permutation_candidates():
        s = score_bvec_candidate(series, mask, cand, thresholds)
        scores[candidate_name(cand)] = s
        best_score = max(best_score, s)

    identity = candidate_name(IDENTITY_CANDIDATE)
    tie_tol = abs(best_score) * thresholds.bvec_tie_rtol
    tied = [n for n in scores if scores[n] >= best_score - tie_tol]
    best = identity if identity in tied else tied[0]

    identity_score = scores[identity]
    margin = (scores[best] - identity_score) / max(identity_score, 1e-9)
    metrics = {
        "identity_score": identity_score,
        "best_score": scores[best],
        "margin": margin,
        "n_candidates": float(len(scores)),
        "best_index": float(list(scores).index(best)),
    }
    if best != identity and margin > thresholds.bvec_margin:
        flag = Flag.FAIL
        details = f"candidate {best} outperforms stored orientation by {margin:.1%}"
    else:
        flag = Flag.OK
        details = f"stored orientation is optimal (best candidate {best})"
    return _result("bvec_permutation", metrics, flag, details, thresholds)


def best_bvec_candidate(result: DiagnosticResult) -> str:
    """Winning candidate name recorded in a bvec_permutation result."""
    return candidate_name(permutation_candidates()[int(result.metrics["best_index"])])


# ---------------------------------------------------------------------------


def check_bundle(
    streamlines: list[Streamline],
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> DiagnosticResult:
    """Bundles need enough streamlines to be usable; empty means infeasible."""
    count = len(streamlines)
    total = float(sum(s.length_mm for s in streamlines))
    metrics = {
        "streamline_count": float(count),
        "total_length_mm": total,
        "mean_length_mm": total / count if count else 0.0,
    }
    if count == 0:
        flag, details = Flag.FAIL, "empty bundle: no streamlines, averages infeasible"
    elif count < thresholds.bundle_min_count:
        flag, details = Flag.FAIL, f"wispy bundle: {count} streamlines"
    else:
        flag, details = Flag.OK, f"bundle is full ({count} streamlines)"
    return _result("bundle", metrics, flag, details, thresholds)


def check_connectome(
    nos: np.ndarray,
    fa: np.ndarray,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> DiagnosticResult:
    """Connectomes should be symmetric, NOS-diagonal-dominant and FA-homogeneous."""
    nos = np.asarray(nos, dtype=np.float64)
    fa = np.asarray(fa, dtype=np.float64)
    if nos.ndim != 2 or nos.shape[0] != nos.shape[1]:
        raise ShapeMismatch(f"NOS matrix is {nos.shape}, expected square")
    if fa.shape != nos.shape:
        raise ShapeMismatch(f"FA matrix {fa.shape} != NOS matrix {nos.shape}")
    n = nos.shape[0]

    def asym(m: np.ndarray) -> float:
        scale = max(float(np.abs(m).max()), 1e-12)
        return float(np.abs(m - m.T).max() / scale)

    diag_is_max = np.diag(nos) >= nos.max(axis=1)
    dominance = float(diag_is_max.mean())
    off = ~np.eye(n, dtype=bool)
    density = float((nos[off] != 0).mean()) if n > 1 else 1.0
    fa_nz = fa[fa != 0]
    if fa_nz.size:
        mean_fa = float(fa_nz.mean())
        cov = float(fa_nz.std() / mean_fa) if mean_fa != 0 else np.inf
    else:
        cov = np.inf
    cov_value = cov if np.isfinite(cov) else 1e9

    metrics = {
        "nos_asymmetry": asym(nos),
        "fa_asymmetry": asym(fa),
        "nos_diagonal_dominance": dominance,
        "fa_cov": cov_value,
        "density": density,
        "n_regions": float(n),
    }
    problems = []
    if metrics["nos_asymmetry"] > thresholds.conn_asymmetry_max:
        problems.append("NOS matrix is asymmetric")
    if metrics["fa_asymmetry"] > thresholds.conn_asymmetry_max:
        problems.append("FA matrix is asymmetric")
    if dominance < thresholds.conn_dominance_min:
        problems.append(f"weak main diagonal (dominance {dominance:.2f})")
    if cov_value > thresholds.conn_fa_cov_max:
        problems.append(f"inhomogeneous FA weights (CoV {cov_value:.2f})")
    if density < thresholds.conn_density_min:
        problems.append(f"sparse connectivity (density {density:.2f})")
    flag = Flag.FAIL if problems else Flag.OK
    return _result(
        "connectome", metrics, flag,
        "; ".join(problems) or "connectome structure looks plausible", thresholds,
    )


def check_freewater(
    fa_orig: np.ndarray,
    fa_fw: np.ndarray,
    wm_mask: np.ndarray,
    nonwm_mask: np.ndarray,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> DiagnosticResult:
    """Correction should enhance WM FA without inflating non-WM FA or noise."""
    fa_orig = np.asarray(fa_orig, dtype=np.float64)
    fa_fw = np.asarray(fa_fw, dtype=np.float64)
    wm = np.asarray(wm_mask, dtype=bool)
    nonwm = np.asarray(nonwm_mask, dtype=bool)
    if not (fa_orig.shape == fa_fw.shape == wm.shape == nonwm.shape):
        raise ShapeMismatch("free-water inputs must share one grid")
    if not wm.any():
        raise MaskEmpty("white matter mask is empty")
    if not nonwm.any():
        raise MaskEmpty("non-WM mask is empty")

    delta = float((fa_fw[wm] - fa_orig[wm]).mean())
    overest = float((fa_fw[nonwm] > thresholds.fw_overest_fa).mean())
    lap_orig = float(np.abs(ndimage.laplace(fa_orig))[wm].mean())
    lap_fw = float(np.abs(ndimage.laplace(fa_fw))[wm].mean())
    metrics = {
        "wm_fa_delta": delta,
        "nonwm_overestimation_fraction": overest,
        "wm_laplacian_orig": lap_orig,
        "wm_laplacian_fw": lap_fw,
    }
    problems = []
    if delta < 0:
        problems.append(f"WM FA decreased by {-delta:.3f}")
    if overest > thresholds.fw_overest_fraction:
        problems.append(f"{overest:.0%} of non-WM has corrected FA above {thresholds.fw_overest_fa}")
    if problems:
        flag, details = Flag.FAIL, "; ".join(problems)
    elif lap_fw > lap_orig * (1.0 + thresholds.fw_noise_warn_ratio):
        flag = Flag.WARN
        details = "corrected map is noticeably noisier than the original"
    else:
        flag, details = Flag.OK, "WM enhanced without non-WM overestimation"
    return _result("freewater", metrics, flag, details, thresholds)


def check_overlay_alignment(
    fa: np.ndarray,
    labels: np.ndarray,
    brain_mask: np.ndarray,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> DiagnosticResult:
    """Registered labels should land on the bright-FA tracts, inside the brain."""
    fa = np.asarray(fa, dtype=np.float64)
    labels = np.asarray(labels)
    brain = np.asarray(brain_mask, dtype=bool)
    if not (fa.shape == labels.shape == brain.shape):
        raise ShapeMismatch("overlay inputs must share one grid")
    labeled = labels > 0
    if not labeled.any():
        raise MaskEmpty("label volume is empty")
    if not brain.any():
        raise MaskEmpty("brain mask is empty")

    outside = float((labeled & ~brain).sum() / labeled.sum())
    inside = labeled & brain
    background = brain & ~labeled
    mean_in = float(fa[inside].mean()) if inside.any() else 0.0
    mean_out = float(fa[background].mean()) if background.any() else 0.0
    contrast = mean_in - mean_out
    metrics = {
        "fa_contrast": contrast,
        "labeled_outside_fraction": outside,
        "mean_fa_labeled": mean_in,
        "mean_fa_background": mean_out,
    }
    problems = []
    if contrast < thresholds.overlay_contrast_min:
        problems.append(f"labels do not align with bright FA (contrast {contrast:.3f})")
    if outside > thresholds.overlay_outside_max:
        problems.append(f"{outside:.0%} of labels fall outside the brain mask")
    flag = Flag.FAIL if problems else Flag.OK
    return _result(
        "overlay_alignment", metrics, flag,
        "; ".join(problems) or "labels align with the white matter", thresholds,
    )


def check_range(
    values,
    lo: float,
    hi: float,
    center: float | None = None,
    name: str = "range",
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> DiagnosticResult:
    """Generic carrier for 'values should sit within [lo, hi]' criteria."""
    if lo >= hi:
        raise ValueError(f"lo {lo} must be below hi {hi}")
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInput("no values supplied")
    in_range = float(((arr >= lo) & (arr <= hi)).mean())
    metrics = {
        "min": float(arr.min()),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
        "fraction_in_range": in_range,
        "lo": lo,
        "hi": hi,
    }
    if center is not None:
        metrics["center_offset"] = float(arr.mean() - center)
    if in_range < thresholds.range_min_fraction:
        flag = Flag.FAIL
        details = f"{name}: only {in_range:.0%} of values inside [{lo:g}, {hi:g}]"
    else:
        flag = Flag.OK
        details = f"{name}: values sit within [{lo:g}, {hi:g}]"
    return _result("range_" + name, metrics, flag, details, thresholds)
