import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spectral_potential_lab import IntervalGrid, PolarGrid, RadialGrid, ball_context

_ACCEPTANCE_RESULTS: dict[str, bool] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE_RESULTS[name] = report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    def sort_key(name):
        m = re.search(r"criterion_(\d+)", name)
        return int(m.group(1)) if m else 99
    for name in sorted(_ACCEPTANCE_RESULTS, key=sort_key):
        label = name.removeprefix("test_").replace("_", " ")
        verdict = "PASS" if _ACCEPTANCE_RESULTS[name] else "FAIL"
        terminalreporter.write_line(f"[{label}] {verdict}")


@pytest.fixture(scope="session")
def interval_grid():
    return IntervalGrid(-1.0, 1.0, 511)


@pytest.fixture(scope="session")
def radial_grid():
    return RadialGrid(1.0, 512)


@pytest.fixture(scope="session")
def polar_grid():
    return PolarGrid(1.0, 64, 64)


@pytest.fixture(scope="session")
def ball_ctx():
    """Optimal-ball context at v0 = 0.25 (r* = 0.5) on a fine radial grid."""
    return ball_context(RadialGrid(1.0, 2048), 0.25)
