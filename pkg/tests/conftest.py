from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from fixture_dataset import build_dataset  # noqa: E402

from dmriqc.dwi import PhantomSpec, generate_phantom  # noqa: E402


@pytest.fixture(scope="session")
def uarc_small():
    """24^3 arc phantom with 12 directions: fast shared fixture."""
    return generate_phantom(
        PhantomSpec(grid=(24, 24, 24), shells=((0.0, 1), (1000.0, 12)), geometry="u-arc")
    )


@pytest.fixture(scope="session")
def straight_small():
    return generate_phantom(
        PhantomSpec(grid=(24, 24, 24), shells=((0.0, 1), (1000.0, 12)), geometry="straight")
    )


@pytest.fixture(scope="session")
def uarc_acceptance():
    """The acceptance-grade phantom: 32^3, one b0 plus 30 directions at b=1000."""
    return generate_phantom(
        PhantomSpec(grid=(32, 32, 32), shells=((0.0, 1), (1000.0, 30)), geometry="u-arc")
    )


@pytest.fixture(scope="session")
def dataset(tmp_path_factory):
    """The seeded 10-scan dataset with its authored ledger."""
    return build_dataset(tmp_path_factory.mktemp("dataset"))
