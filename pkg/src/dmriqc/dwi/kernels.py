"""Tracking kernel selection.

The compiled Cython kernel is preferred when its extension module built;
the pure-Python twin is the fallback. Set DMRIQC_PURE_PYTHON=1 to force
the fallback (used by the benchmark and the lane-equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("DMRIQC_PURE_PYTHON"):
    from . import _tracking_py as _impl
else:
    try:
        from . import _tracking_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _tracking_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
track_all = _impl.track_all


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _tracking_cy  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_track_all(backend: str):
    """Explicit lane lookup, for benchmarks and cross-lane tests."""
    if backend == "python":
        from . import _tracking_py

        return _tracking_py.track_all
    if backend == "cython":
        from . import _tracking_cy

        return _tracking_cy.track_all
    raise ValueError(f"unknown backend {backend!r}")
