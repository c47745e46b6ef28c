import sys

import pytest

from privcomb.rng import RngStream


@pytest.fixture
def rng():
    return RngStream(20240601)


def three_sigma(p: float, trials: int) -> float:
    return 3.0 * (max(p * (1 - p), 1e-12) / trials) ** 0.5


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
