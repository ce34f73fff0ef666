import pytest
from hypothesis import settings

from randflight.domain import ModelParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIG_TIMES = (0.5, 1.0, 5.21, 15.21)


@pytest.fixture
def unit():
    return ModelParams(lam=1.0, v=1.0)
