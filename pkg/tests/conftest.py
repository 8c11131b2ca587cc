import functools

import pytest

from unitals.unital import build_unital, quad_ext_for_order


@functools.lru_cache(maxsize=None)
def _unital(q):
    return build_unital(quad_ext_for_order(q))


@pytest.fixture(scope="session")
def unital():
    """``unital(q)`` returns the shared canonical H(F_{q^2}|F_q)."""
    return _unital
