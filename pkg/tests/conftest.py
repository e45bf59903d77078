import numpy as np
import pytest

from twobridge.world import default_map


@pytest.fixture(scope="session")
def canonical():
    """(grid, regions) of the canonical map, shared read-only."""
    return default_map()


@pytest.fixture(scope="session")
def grid(canonical):
    return canonical[0]


@pytest.fixture(scope="session")
def regions(canonical):
    return canonical[1]


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))
