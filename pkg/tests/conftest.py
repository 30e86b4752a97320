import numpy as np
import pytest

from zcritical.kgeom import CP1ProfileGeometry, TorusGeometry, random_correction, random_potential


@pytest.fixture(scope="session")
def flat_t2():
    return TorusGeometry(1, 32)


@pytest.fixture(scope="session")
def flat_t4():
    return TorusGeometry(2, 8)


@pytest.fixture(scope="session")
def random_t2():
    return TorusGeometry(1, 32, random_potential(1, 32, 3, modes=2, amplitude=0.002))


@pytest.fixture(scope="session")
def random_t4():
    return TorusGeometry(2, 12, random_potential(2, 12, 5, modes=1, amplitude=0.0005))


@pytest.fixture(scope="session")
def round_cp1():
    return CP1ProfileGeometry(64)


@pytest.fixture(scope="session")
def random_cp1():
    return CP1ProfileGeometry(64, random_correction(11))


def sup(a):
    return float(np.max(np.abs(a)))
