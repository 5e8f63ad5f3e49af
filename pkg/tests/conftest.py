import pytest

from intquant import AlgebraSpec, Grid


GRID3 = Grid([0, 1, 2])
GRID4 = Grid([0, 1, 2, 3])


@pytest.fixture(scope="session")
def grid3():
    return GRID3


@pytest.fixture(scope="session")
def grid4():
    return GRID4


@pytest.fixture(scope="session")
def uq(grid3):
    return AlgebraSpec("Uq", grid3)


@pytest.fixture(scope="session")
def uqt(grid3):
    return AlgebraSpec("UqTilde", grid3)


@pytest.fixture(scope="session")
def uh(grid3):
    return AlgebraSpec("UhTrunc", grid3, order=8)


@pytest.fixture(scope="session")
def uht(grid3):
    return AlgebraSpec("UhTildeTrunc", grid3, order=8)


@pytest.fixture(scope="session")
def classical(grid3):
    return AlgebraSpec("ClassicalU", grid3)
