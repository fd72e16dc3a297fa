import re

import pytest

from hybridnfs.polyselect import select_polynomial
from hybridnfs.qubosolve import SolverConfig

SHOWCASE_N = 448383577


@pytest.fixture(scope="session")
def showcase_poly():
    return select_polynomial(SHOWCASE_N, 4)


@pytest.fixture(scope="session")
def exhaustive():
    return SolverConfig(backend="exhaustive")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One verdict line per acceptance criterion at the end of the run."""
    verdicts: dict[int, str] = {}
    for outcome, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            match = re.search(r"test_criterion_(\d+)", getattr(report, "nodeid", ""))
            if match:
                num = int(match.group(1))
                if verdicts.get(num) != "FAIL":
                    verdicts[num] = verdict
    if verdicts:
        terminalreporter.write_sep("-", "acceptance criteria")
        for num in sorted(verdicts):
            terminalreporter.write_line(f"criterion {num}: {verdicts[num]}")
