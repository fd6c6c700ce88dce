"""
Pytest configuration: shared spin systems, bases and seeded generators
"""
import numpy as np
import pytest

from tomochaos.spin import make_gellmann_basis, make_spin_system


@pytest.fixture(scope="session")
def spin10():
    """Spin j = 10 (d = 21), the default system of every experiment"""
    return make_spin_system(10)


@pytest.fixture(scope="session")
def basis21():
    """Gell-Mann basis of su(21)"""
    return make_gellmann_basis(21)


@pytest.fixture(scope="session")
def spin1():
    """Spin j = 1 (d = 3)"""
    return make_spin_system(1)


@pytest.fixture(scope="session")
def basis3():
    return make_gellmann_basis(3)


@pytest.fixture
def rng():
    """Fresh seeded generator per test"""
    return np.random.default_rng(1234)
