import numpy as np
import pytest

from boolent import laws
from boolent.booleanclt import standardize


@pytest.fixture(scope="session")
def semicircle():
    return laws.semicircle()


@pytest.fixture(scope="session")
def semicircle_std(semicircle):
    return standardize(semicircle)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


ACCEPTANCE_LINES = []


@pytest.fixture
def accept(capsys):
    """``accept(n, ok, detail)`` prints one pass/fail line for criterion ``n`` and asserts ``ok``."""

    def report(n, ok, detail):
        line = f"[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
