import pytest

from lpflow import Grid, default_bank


@pytest.fixture(scope="session")
def grid64():
    return Grid(64, 2)


@pytest.fixture(scope="session")
def bank64(grid64):
    return default_bank(grid64.n, grid64.d)


@pytest.fixture(scope="session")
def grid16_3d():
    return Grid(16, 3)


@pytest.fixture(scope="session")
def bank16_3d(grid16_3d):
    return default_bank(grid16_3d.n, grid16_3d.d)
