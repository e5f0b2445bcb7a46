from .checks import (
    IDENTITY_CANDIDATE,
    apply_candidate,
    best_bvec_candidate,
    candidate_name,
    central_band,
    check_bundle,
    check_bvec_permutation,
    check_connectome,
    check_freewater,
    check_intensity_decay,
    check_motion,
    check_outlier_slices,
    check_overlay_alignment,
    check_range,
    permutation_candidates,
    score_bvec_candidate,
)
from .results import DEFAULT_THRESHOLDS, DiagnosticResult, Flag, MotionTrace, Thresholds

__all__ = [
    "DEFAULT_THRESHOLDS",
    "DiagnosticResult",
    "Flag",
    "IDENTITY_CANDIDATE",
    "MotionTrace",
    "Thresholds",
    "apply_candidate",
    "best_bvec_candidate",
    "candidate_name",
    "central_band",
    "check_bundle",
    "check_bvec_permutation",
    "check_connectome",
    "check_freewater",
    "check_intensity_decay",
    "check_motion",
    "check_outlier_slices",
    "check_overlay_alignment",
    "check_range",
    "permutation_candidates",
    "score_bvec_candidate",
]
