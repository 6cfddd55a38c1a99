import numpy as np
import pytest

from trajrefine.trajectory import RobotModel


@pytest.fixture
def robot():
    return RobotModel(0.4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion_line():
    """Record one pass/fail line per acceptance criterion; echoed in the terminal summary."""

    def emit(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        _CRITERIA.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
