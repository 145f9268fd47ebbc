import pytest

from hypbubble.verify import BASE, SECOND, profile

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def W():
    return profile(BASE)


@pytest.fixture(scope="session")
def W_second():
    return profile(SECOND)


@pytest.fixture
def report_line():
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
