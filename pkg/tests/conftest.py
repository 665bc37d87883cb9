import numpy as np
import pytest

from kerrnet import NetworkParams, enumerate_basis, mes_state


@pytest.fixture(scope="session")
def ring_params():
    """Figure convention: periodic ring, k_a = k_b = J, effective hopping sign -1."""
    return NetworkParams(j=-1.0, topology="periodic")


@pytest.fixture(scope="session")
def basis36():
    return enumerate_basis(3, 2, 2, species_total=2)


@pytest.fixture(scope="session")
def basis100():
    return enumerate_basis(3, 2, 2, species_cap=2)


@pytest.fixture(scope="session")
def mes36(basis36):
    return mes_state(basis36, m=3)


@pytest.fixture()
def rng():
    return np.random.default_rng(20160510)
