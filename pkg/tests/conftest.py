import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cavaliers import PASSES_CSV, ROSTER_JSON  # noqa: E402
from passnet import ingest  # noqa: E402
from passnet.model import HmmParams  # noqa: E402


@pytest.fixture(scope="session")
def cavaliers_roster():
    return ingest.parse_roster(ROSTER_JSON.read_text())


@pytest.fixture(scope="session")
def cavaliers_counts(cavaliers_roster):
    return ingest.parse_pass_counts(PASSES_CSV.read_text(), cavaliers_roster)


@pytest.fixture
def cycle_params():
    """Two states that alternate deterministically and emit their own index."""
    return HmmParams([[0, 1], [1, 0]], [[1, 0], [0, 1]], [1, 0])


# --- acceptance summary --------------------------------------------------

_acceptance: list[tuple[str, str, float]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    status = "PASS" if report.passed else "FAIL"
    _acceptance.append((marker.args[0], status, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, seconds in sorted(_acceptance):
        terminalreporter.write_line(f"{status}  {label}  ({seconds:.2f} s)")
