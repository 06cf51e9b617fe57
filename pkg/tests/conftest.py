import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ra_bergman.generator import TripleSineGenerator

settings.register_profile("ra", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ra")


@pytest.fixture(scope="session")
def g():
    return TripleSineGenerator()


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
