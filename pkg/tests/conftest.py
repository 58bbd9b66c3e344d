import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pirpattern.pattern import normalize

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def patterns(draw, n_max=6, m_max=6):
    """Valid collusion patterns in canonical order."""
    n = draw(st.integers(1, n_max))
    raw = draw(
        st.lists(st.sets(st.integers(1, n), min_size=1, max_size=n), min_size=1, max_size=m_max)
    )
    raw = [set(s) for s in raw]
    for i in range(1, n + 1):
        if not any(i in s for s in raw):
            raw[draw(st.integers(0, len(raw) - 1))].add(i)
    return normalize(raw, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
