import math

import numpy as np
import pytest
from hypothesis import settings

from afxy.config import load_config
from afxy.data import Rectangle, SpinField

settings.register_profile("ci", max_examples=30, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def unit_square():
    return Rectangle((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def config():
    return load_config()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_field(rng, unit_square):
    """Uniform random phases around the unit square at eps = 1/20."""
    return SpinField.from_function(
        0.05, unit_square, lambda z1, z2: rng.uniform(-math.pi, math.pi, size=z1.shape)
    )
