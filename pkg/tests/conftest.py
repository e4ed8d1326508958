import numpy as np
import pytest

from qig.verify import random_family


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def family(rng):
    return random_family(rng)
