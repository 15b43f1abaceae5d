import functools

import pytest
from hypothesis import settings

from crsharp.discretize import hopf_rule, real_sphere_rule

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def cached_hopf(n_s, n_a):
    return hopf_rule(n_s, n_a)


@functools.lru_cache(maxsize=None)
def cached_s2(n_t, n_p):
    return real_sphere_rule(2, (n_t, n_p))


@pytest.fixture(scope="session")
def rule24():
    return cached_hopf(24, 24)


@pytest.fixture(scope="session")
def s2_rule():
    return cached_s2(24, 48)
