import numpy as np
import pytest

from morseactions.cosine import CosineRef
from morseactions.potential import make_potential, pendulum_potential
from morseactions.system import pure_system

TWOWELL_COS = [-1.0, 0.5, 0.0]
TWOWELL_SIN = [0.08, 0.0, 0.03]


@pytest.fixture(scope="session")
def pendulum_pot():
    return pendulum_potential()


@pytest.fixture(scope="session")
def pendulum(pendulum_pot):
    return pure_system(pendulum_pot, R0=35.0)


@pytest.fixture(scope="session")
def twowell_pot():
    return make_potential(cos=TWOWELL_COS, sin=TWOWELL_SIN, s0=1.0)


@pytest.fixture(scope="session")
def twowell(twowell_pot):
    return pure_system(twowell_pot, R0=12.0)


@pytest.fixture(scope="session")
def cosine_ref():
    return CosineRef(1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)
