import sys
from fractions import Fraction

import pytest
from hypothesis import settings

from fracsob.exponents import SpaceParams
from fracsob.spaces import RadialGrid

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return SpaceParams(3, Fraction(3, 4))


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(N=3)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(acc, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1][2:])):
            terminalreporter.write_line(line)
