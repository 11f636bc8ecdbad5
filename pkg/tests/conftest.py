import pytest

from debranges_extremal.extremal import cached_extremal
from debranges_extremal.hb import HBParams


@pytest.fixture(scope="session")
def pair1():
    return cached_extremal(1.0)


@pytest.fixture(scope="session")
def pair_half():
    return cached_extremal(0.5)


@pytest.fixture(scope="session")
def pair2():
    return cached_extremal(2.0)


@pytest.fixture(scope="session")
def p1():
    return HBParams(1.0)
