import numpy as np
import pytest

from bikitaev.algebras import BUILTIN_NAMES, builtin


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(params=BUILTIN_NAMES)
def algebra(request):
    return builtin(request.param)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for an acceptance criterion and assert on it."""

    def emit(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        assert ok, line

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
