import pytest

from agsim.geom import Box, Point3

UE = Point3(0.0, 0.0, 0.0)
UAV = Point3(30.0, 0.0, 10.0)


@pytest.fixture
def reference_building():
    return Box.from_bounds(10.0, 20.0, 0.0, 50.0, -30.0, 30.0)


# One line per acceptance criterion, printed at the end of the session.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
