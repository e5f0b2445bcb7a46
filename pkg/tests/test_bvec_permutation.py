"""Gradient orientation sweep: identity wins clean, flips are caught."""

import numpy as np

from dmriqc.diagnostics import (
    IDENTITY_CANDIDATE,
    apply_candidate,
    best_bvec_candidate,
    candidate_name,
    check_bvec_permutation,
    permutation_candidates,
)
from dmriqc.diagnostics.results import Flag
from dmriqc.dwi import DwiSeries, GradientTable


def negate_axis(series, axis):
    g = series.gradients
    bv = np.array(g.bvecs)
    bv[:, axis] *= -1.0
    return DwiSeries(series.voxels, series.voxel_size, GradientTable(g.bvals, bv))


def test_candidate_enumeration():
    cands = permutation_candidates()
    assert len(cands) == 48
    assert len(set(map(candidate_name, cands))) == 48
    assert cands[0] == IDENTITY_CANDIDATE
    assert candidate_name(cands[0]) == "xyz:+++"
    # Single flips come before double flips for the same axis order.
    names = [candidate_name(c) for c in cands[:8]]
    assert names == [
        "xyz:+++", "xyz:-++", "xyz:+-+", "xyz:++-",
        "xyz:--+", "xyz:-+-", "xyz:+--", "xyz:---",
    ]


def test_apply_candidate_permutes_and_signs():
    bvecs = np.array([[1.0, 2.0, 3.0]])
    out = apply_candidate(bvecs, ((2, 0, 1), (1, -1, 1)))
    assert np.allclose(out, [[3.0, -1.0, 2.0]])


def test_identity_wins_on_clean_phantom(uarc_small):
    res = check_bvec_permutation(uarc_small.series)
    assert best_bvec_candidate(res) == "xyz:+++"
    assert res.flag is Flag.OK
    assert abs(res.metrics["margin"]) < 1e-9


def test_x_flip_detected(uarc_small):
    res = check_bvec_permutation(negate_axis(uarc_small.series, 0))
    assert best_bvec_candidate(res) == "xyz:-++"
    assert res.flag is Flag.FAIL
    assert res.metrics["margin"] > 0.05


def test_corrupt_then_restore_matches_original(uarc_small):
    baseline = check_bvec_permutation(uarc_small.series)
    restored = negate_axis(negate_axis(uarc_small.series, 0), 0)
    again = check_bvec_permutation(restored)
    assert best_bvec_candidate(again) == best_bvec_candidate(baseline)
    assert again.metrics == baseline.metrics


def test_axis_swap_detected(uarc_small):
    g = uarc_small.series.gradients
    swapped = DwiSeries(
        uarc_small.series.voxels,
        uarc_small.series.voxel_size,
        GradientTable(g.bvals, g.bvecs[:, [1, 0, 2]]),
    )
    res = check_bvec_permutation(swapped)
    assert res.flag is Flag.FAIL
    assert best_bvec_candidate(res) == "yxz:+++"
