import sys

import pytest

from exotic7.exact import ExactMatrix


@pytest.fixture
def c7_matrix():
    return ExactMatrix([
        [-2, 1, 0, 0, 0, 0],
        [1, -2, 1, 0, 0, 0],
        [0, 1, -2, 1, 0, 0],
        [0, 0, 1, -2, 1, 0],
        [0, 0, 0, 1, -2, 1],
        [0, 0, 0, 0, 1, -9],
    ])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if results[n] else 'FAIL'}")
