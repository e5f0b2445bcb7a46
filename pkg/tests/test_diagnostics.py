"""Advisory checks: one test block per check, mirroring its failure modes."""

import dataclasses

import numpy as np
import pytest

from dmriqc.diagnostics import (
    DEFAULT_THRESHOLDS,
    DiagnosticResult,
    Flag,
    MotionTrace,
    Thresholds,
    check_bundle,
    check_connectome,
    check_freewater,
    check_intensity_decay,
    check_motion,
    check_outlier_slices,
    check_overlay_alignment,
    check_range,
)
from dmriqc.dwi import DwiSeries, GradientTable, PhantomSpec, Streamline, generate_phantom
from dmriqc.errors import EmptyInput, MaskEmpty, ShapeMismatch


@pytest.fixture(scope="module")
def multishell():
    return generate_phantom(
        PhantomSpec(
            grid=(16, 16, 16),
            shells=((0.0, 1), (500.0, 6), (1000.0, 6), (2000.0, 6)),
            geometry="isotropic",
        )
    )


class TestIntensityDecay:
    def test_phantom_decays(self, multishell):
        res = check_intensity_decay(multishell.series)
        assert res.flag is Flag.OK
        assert res.metrics["spearman_rho"] == -1.0
        assert res.metrics["log_linear_r2"] > 0.99

    def test_shuffled_labels_fail(self, multishell):
        g = multishell.series.gradients
        bvals = np.array(g.bvals)
        shells = g.shells()
        # Swap the b-value labels of the lowest and highest shells.
        b_lo, idx_lo = shells[0]
        b_hi, idx_hi = shells[-1]
        bvals[idx_lo] = b_hi
        bvals[idx_hi] = b_lo
        zeros = np.array(g.bvecs)
        zeros[idx_lo] = np.tile([1.0, 0.0, 0.0], (len(idx_lo), 1))
        mislabeled = DwiSeries(
            multishell.series.voxels,
            multishell.series.voxel_size,
            GradientTable(bvals, zeros),
        )
        res = check_intensity_decay(mislabeled)
        assert res.flag is Flag.FAIL
        assert res.metrics["spearman_rho"] > -0.9

    def test_single_shell_warns(self):
        ph = generate_phantom(
            PhantomSpec(grid=(12, 12, 12), shells=((1000.0, 7),), geometry="isotropic")
        )
        res = check_intensity_decay(ph.series)
        assert res.flag is Flag.WARN
        assert "single shell" in res.details


class TestMotion:
    def test_constant_trace_ok(self):
        trace = MotionTrace(np.ones((20, 3)) * 0.3, np.zeros((20, 3)))
        res = check_motion(trace)
        assert res.flag is Flag.OK
        assert res.metrics["max_translation_jump_mm"] == 0.0

    def test_alternating_jumps_fail(self):
        t = np.zeros((20, 3))
        t[1::2, 0] = 3.0  # +-3 mm on x every volume
        res = check_motion(MotionTrace(t, np.zeros_like(t)))
        assert res.flag is Flag.FAIL
        assert res.metrics["jump_fraction"] == 1.0

    def test_smooth_drift_ok(self):
        t = np.linspace(0, 6.0, 60)[:, None] * np.ones(3)  # 0.1 mm/volume
        res = check_motion(MotionTrace(t, np.zeros_like(t)))
        assert res.flag is Flag.OK

    def test_single_big_jump_warns(self):
        t = np.zeros((30, 3))
        t[15:, 1] = 5.0  # one 5 mm step
        res = check_motion(MotionTrace(t, np.zeros_like(t)))
        assert res.flag is Flag.WARN

    def test_rotation_jumps_counted(self):
        r = np.zeros((20, 3))
        r[1::2, 2] = 3.0
        res = check_motion(MotionTrace(np.zeros_like(r), r))
        assert res.flag is Flag.FAIL


class TestOutlierSlices:
    def test_all_zero_ok(self):
        res = check_outlier_slices(np.zeros((60, 50), dtype=bool))
        assert res.flag is Flag.OK

    def test_central_band_majority_fails(self):
        om = np.zeros((60, 50), dtype=bool)
        om[: 40, 20:31] = True  # central slices flagged in most volumes
        res = check_outlier_slices(om)
        assert res.flag is Flag.FAIL
        assert res.metrics["central_fraction"] > 0.05

    def test_single_flag_ok(self):
        om = np.zeros((60, 50), dtype=bool)
        om[10, 3] = True
        res = check_outlier_slices(om)
        assert res.flag is Flag.OK

    def test_peripheral_bulk_fails_overall(self):
        om = np.zeros((60, 50), dtype=bool)
        om[:, :8] = True  # 16% overall, all peripheral
        res = check_outlier_slices(om)
        assert res.flag is Flag.FAIL
        assert res.metrics["central_fraction"] == 0.0


class TestBundle:
    def line(self, n_points=12):
        pts = np.zeros((n_points, 3))
        pts[:, 1] = np.arange(n_points, dtype=float)
        return Streamline(pts)

    def test_empty_fails(self):
        res = check_bundle([])
        assert res.flag is Flag.FAIL
        assert "empty" in res.details

    def test_wispy_fails(self):
        res = check_bundle([self.line() for _ in range(10)])
        assert res.flag is Flag.FAIL
        assert "wispy" in res.details

    def test_full_bundle_ok(self):
        res = check_bundle([self.line() for _ in range(5000)])
        assert res.flag is Flag.OK
        assert res.metrics["streamline_count"] == 5000.0
        assert res.metrics["mean_length_mm"] == pytest.approx(11.0)


class TestConnectome:
    def good_nos(self, n=12):
        m = np.full((n, n), 4.0)
        np.fill_diagonal(m, 50.0)
        return m

    def test_symmetric_dominant_ok(self):
        res = check_connectome(self.good_nos(), np.full((12, 12), 0.5))
        assert res.flag is Flag.OK
        assert res.metrics["nos_asymmetry"] == 0.0
        assert res.metrics["nos_diagonal_dominance"] == 1.0

    def test_zero_diagonal_fails(self):
        m = self.good_nos()
        np.fill_diagonal(m, 0.0)
        res = check_connectome(m, np.full((12, 12), 0.5))
        assert res.flag is Flag.FAIL
        assert res.metrics["nos_diagonal_dominance"] == 0.0

    def test_asymmetric_fails(self):
        m = self.good_nos()
        m[0, 1] = 40.0  # not mirrored
        res = check_connectome(m, np.full((12, 12), 0.5))
        assert res.flag is Flag.FAIL
        assert res.metrics["nos_asymmetry"] > 1e-6

    def test_bimodal_fa_cov_fails(self):
        # Symmetric checkerboard: exactly half the entries 0.2, half 0.8.
        i, j = np.indices((12, 12))
        fa = np.where((i + j) % 2 == 0, 0.8, 0.2)
        # Direct formula: CoV of the nonzero entries.
        vals = fa[fa != 0]
        cov = vals.std() / vals.mean()
        res = check_connectome(self.good_nos(), fa)
        assert res.metrics["fa_cov"] == pytest.approx(cov)
        assert cov > DEFAULT_THRESHOLDS.conn_fa_cov_max
        assert res.flag is Flag.FAIL

    def test_sparse_fails(self):
        m = np.zeros((12, 12))
        np.fill_diagonal(m, 10.0)
        res = check_connectome(m, np.full((12, 12), 0.5))
        assert res.flag is Flag.FAIL
        assert res.metrics["density"] == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            check_connectome(np.zeros((3, 4)), np.zeros((3, 3)))
        with pytest.raises(ShapeMismatch):
            check_connectome(np.zeros((3, 3)), np.zeros((4, 4)))


class TestFreewater:
    def setup_method(self):
        shape = (10, 10, 10)
        self.wm = np.zeros(shape, dtype=bool)
        self.wm[3:7, 3:7, 3:7] = True
        self.nonwm = ~self.wm
        self.fa = np.where(self.wm, 0.6, 0.15)

    def test_enhancement_ok(self):
        fa_fw = np.where(self.wm, self.fa + 0.1, self.fa)
        res = check_freewater(self.fa, fa_fw, self.wm, self.nonwm)
        assert res.flag is Flag.OK
        assert res.metrics["wm_fa_delta"] == pytest.approx(0.1)

    def test_nonwm_overestimation_fails(self):
        fa_fw = np.where(self.nonwm, 0.9, self.fa)
        res = check_freewater(self.fa, fa_fw, self.wm, self.nonwm)
        assert res.flag is Flag.FAIL
        assert res.metrics["nonwm_overestimation_fraction"] == pytest.approx(1.0)

    def test_identity_passes_boundary(self):
        # Delta of exactly zero is the documented pass boundary.
        res = check_freewater(self.fa, self.fa.copy(), self.wm, self.nonwm)
        assert res.metrics["wm_fa_delta"] == 0.0
        assert res.flag is not Flag.FAIL

    def test_decrease_fails(self):
        fa_fw = np.where(self.wm, self.fa - 0.05, self.fa)
        res = check_freewater(self.fa, fa_fw, self.wm, self.nonwm)
        assert res.flag is Flag.FAIL

    def test_noisier_map_warns(self):
        # A flat baseline has near-zero Laplacian; any speckle trips the
        # noise ratio without touching the fail conditions.
        flat = np.full(self.fa.shape, 0.5)
        rng = np.random.default_rng(0)
        fa_fw = flat + 0.02 + rng.normal(0, 0.03, flat.shape)
        res = check_freewater(flat, fa_fw, self.wm, self.nonwm)
        assert res.flag is Flag.WARN

    def test_empty_mask_raises(self):
        with pytest.raises(MaskEmpty):
            check_freewater(self.fa, self.fa, np.zeros_like(self.wm), self.nonwm)


class TestOverlayAlignment:
    def setup_method(self):
        shape = (16, 16, 16)
        self.brain = np.zeros(shape, dtype=bool)
        self.brain[2:14, 2:14, 2:14] = True
        self.tract = np.zeros(shape, dtype=bool)
        self.tract[6:10, 4:12, 7:9] = True
        self.fa = np.where(self.tract, 0.75, np.where(self.brain, 0.15, 0.0))

    def test_labels_on_tract_ok(self):
        labels = np.where(self.tract, 3, 0)
        res = check_overlay_alignment(self.fa, labels, self.brain)
        assert res.flag is Flag.OK
        assert res.metrics["fa_contrast"] == pytest.approx(0.6)

    def test_translated_labels_fail(self):
        labels = np.zeros_like(self.fa, dtype=int)
        shifted = np.roll(self.tract, 10, axis=0)
        labels[shifted] = 3
        res = check_overlay_alignment(self.fa, labels, self.brain)
        assert res.flag is Flag.FAIL

    def test_empty_labels_raise(self):
        with pytest.raises(MaskEmpty):
            check_overlay_alignment(self.fa, np.zeros_like(self.fa, dtype=int), self.brain)


class TestRange:
    def test_inside_ok(self):
        res = check_range([0.5, 0.6, 0.45], 0.4, 0.9, name="bundle_fa")
        assert res.flag is Flag.OK

    def test_low_mean_fails(self):
        res = check_range([0.1, 0.12, 0.09], 0.4, 0.9, name="bundle_fa")
        assert res.flag is Flag.FAIL

    def test_ninety_percent_inside_fails(self):
        values = [0.5] * 9 + [0.95]
        res = check_range(values, 0.4, 0.9)
        assert res.metrics["fraction_in_range"] == pytest.approx(0.9)
        assert res.flag is Flag.FAIL

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            check_range([], 0.0, 1.0)

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            check_range([1.0], 1.0, 0.0)


class TestResultContracts:
    def test_serialization_deterministic(self, multishell):
        a = check_intensity_decay(multishell.series).to_json_bytes()
        b = check_intensity_decay(multishell.series).to_json_bytes()
        assert a == b

    def test_metrics_must_be_finite(self):
        with pytest.raises(ValueError):
            DiagnosticResult("x", {"bad": float("nan")}, Flag.OK, "")

    def test_thresholds_roundtrip(self):
        th = dataclasses.replace(DEFAULT_THRESHOLDS, motion_jump_mm=3.5, version="2")
        assert Thresholds.from_dict(th.to_dict()) == th

    def test_thresholds_reject_unknown_keys(self):
        with pytest.raises(ValueError):
            Thresholds.from_dict({"no_such_threshold": 1.0})

    def test_version_recorded(self, multishell):
        th = dataclasses.replace(DEFAULT_THRESHOLDS, version="9")
        res = check_intensity_decay(multishell.series, th)
        assert res.thresholds_version == "9"


class TestFlagMonotonicity:
    def test_relaxing_motion_thresholds_never_fails_an_ok(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            t = rng.normal(0, 1.2, size=(15, 3)).cumsum(axis=0) * 0.3
            r = rng.normal(0, 0.6, size=(15, 3)).cumsum(axis=0) * 0.3
            trace = MotionTrace(t, r)
            strict = check_motion(trace)
            relaxed_th = dataclasses.replace(
                DEFAULT_THRESHOLDS,
                motion_jump_mm=DEFAULT_THRESHOLDS.motion_jump_mm * 2,
                motion_jump_deg=DEFAULT_THRESHOLDS.motion_jump_deg * 2,
                motion_fail_fraction=DEFAULT_THRESHOLDS.motion_fail_fraction * 2,
                motion_warn_single_mm=DEFAULT_THRESHOLDS.motion_warn_single_mm * 2,
            )
            relaxed = check_motion(trace, relaxed_th)
            if strict.flag is Flag.OK:
                assert relaxed.flag is Flag.OK

    def test_relaxing_outlier_thresholds_never_fails_an_ok(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            om = rng.random((20, 30)) < rng.uniform(0, 0.15)
            strict = check_outlier_slices(om)
            relaxed_th = dataclasses.replace(
                DEFAULT_THRESHOLDS,
                outlier_central_fraction=0.2,
                outlier_overall_fraction=0.4,
            )
            relaxed = check_outlier_slices(om, relaxed_th)
            if strict.flag is Flag.OK:
                assert relaxed.flag is Flag.OK
