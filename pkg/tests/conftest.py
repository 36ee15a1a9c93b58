import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from blockcoh.core import contiguous_structure, make_block_structure

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def structures(draw, max_blocks=4, max_dim=3, min_blocks=1, shuffle=True):
    """Random block structures; with ``shuffle`` the groups are non-contiguous."""
    dims = draw(st.lists(st.integers(1, max_dim), min_size=min_blocks, max_size=max_blocks))
    if not shuffle:
        return contiguous_structure(dims)
    perm = draw(st.permutations(range(sum(dims))))
    groups, start = [], 0
    for n in dims:
        groups.append(sorted(perm[start:start + n]))
        start += n
    return make_block_structure(groups)


seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
