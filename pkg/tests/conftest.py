import pytest

from phasefront.model import PressureModel

# pass/fail lines from the acceptance suite, echoed after the test run
ACCEPTANCE_LINES = []


@pytest.fixture
def pm():
    return PressureModel(1.0, 4.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
