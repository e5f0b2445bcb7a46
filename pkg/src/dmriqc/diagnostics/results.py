"""Advisory diagnostic results and their threshold configuration.

Checks compute metrics and an Ok/Warn/Fail flag. Flags inform the rater's
checklist; they never submit or override a human verdict. All numeric
cutoffs live in a versioned Thresholds value (the criteria they encode
are qualitative in origin; the numbers are this artifact's defaults) and
every result records which version produced it.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, fields

import numpy as np


class Flag(enum.Enum):
    OK = "ok"
    WARN = "warn"
    FAIL = "fail"


@dataclass(frozen=True)
class Thresholds:
    version: str = "1"

    # intensity decay
    decay_rho_max: float = -0.9  # fail when Spearman rho exceeds this
    decay_monotone_tol: float = 0.05  # shell medians may rise by this fraction
    decay_r2_warn: float = 0.8

    # motion continuity
    motion_jump_mm: float = 2.0
    motion_jump_deg: float = 2.0
    motion_fail_fraction: float = 0.10
    motion_warn_single_mm: float = 4.0

    # slice outlier imputation
    outlier_central_band: float = 0.5  # middle fraction of the slice axis
    outlier_central_fraction: float = 0.05
    outlier_overall_fraction: float = 0.10

    # slice chi-square localization (bundle-level advisory summary)
    chi_ratio_max: float = 10.0

    # b-vector permutation sweep
    bvec_margin: float = 0.05
    bvec_tie_rtol: float = 1e-9
    bvec_seed_fa: float = 0.25
    bvec_seed_stride: int = 2

    # bundle population
    bundle_min_count: int = 50

    # connectome structure
    conn_asymmetry_max: float = 1e-6
    conn_dominance_min: float = 0.9
    conn_fa_cov_max: float = 0.5
    conn_density_min: float = 0.2

    # free-water corrected FA
    fw_overest_fa: float = 0.6
    fw_overest_fraction: float = 0.10
    fw_noise_warn_ratio: float = 0.5

    # label overlay alignment
    overlay_contrast_min: float = 0.05
    overlay_outside_max: float = 0.05

    # generic range criterion
    range_min_fraction: float = 0.95

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Thresholds":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown threshold keys {sorted(unknown)}")
        return cls(**d)


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class DiagnosticResult:
    check_name: str
    metrics: dict[str, float]
    flag: Flag
    details: str
    thresholds_version: str = DEFAULT_THRESHOLDS.version

    def __post_init__(self):
        clean = {}
        for k, v in self.metrics.items():
            v = float(v)
            if not np.isfinite(v):
                raise ValueError(f"{self.check_name}: non-finite metric {k}={v}")
            clean[k] = v
        object.__setattr__(self, "metrics", clean)

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "metrics": {k: self.metrics[k] for k in sorted(self.metrics)},
            "flag": self.flag.value,
            "details": self.details,
            "thresholds_version": self.thresholds_version,
        }

    def to_json_bytes(self) -> bytes:
        """Canonical encoding: identical inputs give identical bytes."""
        return json.dumps(
            self.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=True
        ).encode("utf-8")

    @classmethod
    def from_dict(cls, d: dict) -> "DiagnosticResult":
        return cls(
            check_name=d["check_name"],
            metrics=dict(d["metrics"]),
            flag=Flag(d["flag"]),
            details=d["details"],
            thresholds_version=d.get("thresholds_version", DEFAULT_THRESHOLDS.version),
        )


@dataclass(frozen=True)
class MotionTrace:
    """Per-volume head translation (mm) and rotation (degrees)."""

    translations: np.ndarray  # (N, 3)
    rotations: np.ndarray  # (N, 3)

    def __post_init__(self):
        t = np.asarray(self.translations, dtype=np.float64)
        r = np.asarray(self.rotations, dtype=np.float64)
        object.__setattr__(self, "translations", t)
        object.__setattr__(self, "rotations", r)
        if t.ndim != 2 or t.shape[1] != 3 or r.shape != t.shape:
            raise ValueError(f"bad motion trace shapes {t.shape} / {r.shape}")

    def __len__(self) -> int:
        return len(self.translations)
