import math

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("kpp", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kpp")

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def phi():
    from kpplab.waves_1d import solve_steady_phi
    return solve_steady_phi()


@pytest.fixture(scope="session")
def w_star():
    from kpplab.waves_1d import C_STAR, solve_wave_1d
    return solve_wave_1d(C_STAR)


@pytest.fixture(scope="session")
def coarse_field():
    """Critical wave on the default domain at h = 0.2 (a few seconds)."""
    from kpplab.pde_2d import C_STAR, Domain, march_to_steady
    return march_to_steady(C_STAR, Domain(hx=0.2, hy=0.2))


@pytest.fixture(scope="session")
def medium_field():
    from kpplab.pde_2d import C_STAR, Domain, march_to_steady
    return march_to_steady(C_STAR, Domain(hx=0.1, hy=0.1))


@pytest.fixture(scope="session")
def fine_field():
    """Default-resolution wave, h = 0.05 (about half a minute)."""
    from kpplab.pde_2d import C_STAR, Domain, march_to_steady
    return march_to_steady(C_STAR, Domain())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(r.summary())
