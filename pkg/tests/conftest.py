import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from kstiefel.algebra import Field

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FIELDS = [Field.R, Field.C, Field.H]
FIELD_IDS = ["R", "C", "H"]


@pytest.fixture(params=FIELDS, ids=FIELD_IDS)
def field(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
quats = st.tuples(finite, finite, finite, finite)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
