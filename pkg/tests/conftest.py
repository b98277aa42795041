import numpy as np
import pytest

from bucklab import make_disk_mesh, make_rectangle_mesh


@pytest.fixture(scope="session")
def disk2():
    return make_disk_mesh(1.0, 2)


@pytest.fixture(scope="session")
def disk3():
    return make_disk_mesh(1.0, 3)


@pytest.fixture(scope="session")
def disk4():
    return make_disk_mesh(1.0, 4)


@pytest.fixture(scope="session")
def rect16():
    return make_rectangle_mesh(1.0, 1.0, 16, 16)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
