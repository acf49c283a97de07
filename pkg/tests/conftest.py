from fractions import Fraction

import pytest

from denseorbit.construction import build_generators


@pytest.fixture(scope="session")
def G6():
    return build_generators(6, Fraction(1, 2), 4096)


@pytest.fixture(scope="session")
def G8():
    return build_generators(8, Fraction(1, 2), 8192)


@pytest.fixture(scope="session")
def G4():
    return build_generators(4, Fraction(1, 2), 1024)


# one line per acceptance criterion, shown in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
