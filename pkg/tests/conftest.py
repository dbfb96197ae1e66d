import pytest
from hypothesis import HealthCheck, settings

from colombeau_lab import testobjects as to

# Numerical properties are slow per example; keep the example count modest
# and let the high-precision paths take their time.
settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def family():
    return to.make_family(q_max=6)


@pytest.fixture(scope="session")
def small_family():
    return to.make_family(q_max=2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
