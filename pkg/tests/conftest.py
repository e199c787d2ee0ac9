import pytest

from qloop.cartan import preset

# Lines recorded by tests/test_acceptance.py, echoed in the terminal summary.
CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def criterion_log():
    return CRITERIA


@pytest.fixture(scope="session")
def A1():
    return preset("A1")


@pytest.fixture(scope="session")
def A2():
    return preset("A2")


@pytest.fixture(scope="session")
def B2():
    return preset("B2")


@pytest.fixture(scope="session")
def G2():
    return preset("G2")


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
