import numpy as np
import pytest

from vexnorm.grid import build_grid


@pytest.fixture(scope="session")
def grid_1d():
    """n = 1, shells -3..3, 512 cells, h = 1/32."""
    return build_grid(1, -4, 3, 8)


@pytest.fixture(scope="session")
def small_grid():
    """n = 1, shells -3..3, 128 cells, h = 1/8."""
    return build_grid(1, -4, 3, 6)


@pytest.fixture(scope="session")
def grid_2d():
    return build_grid(2, -3, 2, 6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
