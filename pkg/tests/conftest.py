import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from evosurf.suite import catalog, run_suite


@pytest.fixture(scope="session")
def sphere():
    return catalog.surface("unit_sphere")


@pytest.fixture(scope="session")
def torus():
    return catalog.surface("torus")


@pytest.fixture(scope="session")
def ellipsoid():
    return catalog.surface("ellipsoid")


@pytest.fixture()
def rng():
    return np.random.default_rng(909)


@pytest.fixture(scope="session")
def suite_report():
    """One full default-configuration suite run, shared across test modules.

    The acceptance tests read individual check results out of this report;
    running it once keeps the overall pytest wall time close to the cost of
    a single ``evosurf verify``.
    """
    return run_suite()
