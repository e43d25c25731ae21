import pytest

from gluing import fixtures


@pytest.fixture
def prbox():
    return fixtures.prbox()


@pytest.fixture
def hardy():
    return fixtures.hardy()


@pytest.fixture
def product():
    return fixtures.product()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
