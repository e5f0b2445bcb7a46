"""Automatic brain mask for decay and fit checks.

Deliberately simple and fully deterministic: threshold the mean b0 volume
at 10% of its 98th percentile and keep the largest connected component.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .types import DwiSeries

THRESHOLD_FRACTION = 0.10
PERCENTILE = 98.0


def auto_mask(series: DwiSeries) -> np.ndarray:
    mean_b0 = series.mean_b0()
    cutoff = THRESHOLD_FRACTION * np.percentile(mean_b0, PERCENTILE)
    rough = mean_b0 > cutoff
    if not rough.any():
        return rough
    labels, n = ndimage.label(rough)
    if n <= 1:
        return rough
    sizes = ndimage.sum_labels(np.ones_like(labels), labels, index=np.arange(1, n + 1))
    return labels == (int(np.argmax(sizes)) + 1)
