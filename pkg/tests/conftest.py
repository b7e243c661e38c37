import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from symtsp import EXAMPLE4_START_TOUR, load_fixture
from symtsp.permutation import Tour

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ex3():
    return load_fixture("example3")


@pytest.fixture(scope="session")
def ex4():
    return load_fixture("example4")


@pytest.fixture(scope="session")
def t1():
    return Tour(EXAMPLE4_START_TOUR)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
