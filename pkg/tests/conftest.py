import pytest
from hypothesis import HealthCheck, settings

from opmetric.oracles import InstanceFactory

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# filled by test_acceptance; printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def factory():
    return InstanceFactory(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
