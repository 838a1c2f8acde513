import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from deltacolor import generators  # noqa: E402


@pytest.fixture(scope="session")
def petersen():
    return generators.petersen()


@pytest.fixture(scope="session")
def tutte12():
    return generators.cage("tutte-12")


@pytest.fixture(scope="session")
def heawood():
    return generators.cage("heawood")


_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion; shown in the terminal summary."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(num, ok, detail):
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((num, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
