import functools

import pytest
from hypothesis import HealthCheck, settings

from strongcoupling.oracle import SolverConfig, cross_validate, solve_bound_state

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# acceptance lines collected during the run and echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def cached_solve(profile_key, L, n_r, method="shooting"):
    """Oracle solve memoised on a hashable profile key (see ``profile_from_key``)."""
    return solve_bound_state(profile_from_key(profile_key), L, n_r, method=method)


@functools.lru_cache(maxsize=None)
def cached_cross(profile_key, L, n_r):
    return cross_validate(profile_from_key(profile_key), L, n_r)


def profile_from_key(key):
    from strongcoupling.core import PowerLawPotential
    from strongcoupling.oracle import coulomb_profile, power_law_profile, yukawa_profile

    kind = key[0]
    if kind == "coulomb":
        return coulomb_profile()
    if kind == "yukawa":
        return yukawa_profile(key[1])
    if kind == "power":
        _, k, n, g, scale = key
        return power_law_profile(PowerLawPotential(k, n, g=g, scale=scale))
    raise KeyError(key)


@pytest.fixture(scope="session")
def default_cfg():
    return SolverConfig()
