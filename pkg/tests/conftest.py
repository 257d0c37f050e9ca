import random

import pytest
from hypothesis import settings, strategies as st

from twuality import SetSystem

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def set_systems(max_n=5, proper=False):
    """Strategy for random systems: ground size then a family of masks."""

    def build(n):
        full = 1 << n
        return st.frozensets(
            st.integers(0, full - 1), min_size=1 if proper else 0, max_size=full
        ).map(lambda masks: SetSystem(n, masks))

    return st.integers(0, max_n).flatmap(build)


def subset_of(n):
    return st.integers(0, (1 << n) - 1)


@pytest.fixture(scope="session")
def vf_cache():
    """Shared vf-safety verdict cache; sound because the verdict depends
    only on the system up to relabeling."""
    return {}


@pytest.fixture(scope="session")
def rng():
    return random.Random(20250811)
