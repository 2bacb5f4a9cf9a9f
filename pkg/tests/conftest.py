import sys

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "exact",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("exact")

from tricorr import forms


@pytest.fixture(scope="session")
def delta_big():
    # covers the largest exponential grid (tail 40, X = 2^13, c up to 2m-1)
    return forms.gen_level1_eigenform(12, 660000)


@pytest.fixture(scope="session")
def delta_100k(delta_big):
    return delta_big.truncated(100000)


@pytest.fixture(scope="session")
def delta_41k(delta_big):
    # enough for exponential kernels with X, Y <= 512 at tail factor 40
    return delta_big.truncated(41000)


@pytest.fixture(scope="session")
def delta_2k(delta_big):
    return delta_big.truncated(2000)


@pytest.fixture(scope="session")
def delta_200(delta_big):
    return delta_big.truncated(200)


@pytest.fixture(scope="session")
def w16_10k():
    return forms.gen_level1_eigenform(16, 10000)


@pytest.fixture(scope="session")
def w22_10k():
    return forms.gen_level1_eigenform(22, 10000)


@pytest.fixture(scope="session")
def theta_2k():
    return forms.gen_theta(2000)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # the per-criterion lines are printed inside captured stdout; repeat
    # them after the run so they are visible without -s
    for name in ("test_acceptance", "tests.test_acceptance"):
        mod = sys.modules.get(name)
        if mod is not None and getattr(mod, "CRITERION_LINES", None):
            terminalreporter.section("acceptance criteria")
            for line in mod.CRITERION_LINES:
                terminalreporter.write_line(line)
            break
