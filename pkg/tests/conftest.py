import itertools

import numpy as np
import pytest

from qarith.simulator import ATOL, run_basis

ACCEPTANCE_FILE = "test_acceptance.py"
_acceptance: dict[str, str] = {}


def exhaust(circuit, layout, cases):
    """Run every input dict in ``cases`` and return decoded outputs.

    Asserts each input lands on a single basis state, so every register
    (ancillas included) was measured with certainty.
    """
    cases = list(cases)
    out, prob = run_basis(circuit, [layout.encode(**c) for c in cases])
    assert prob.min() >= 1 - ATOL, f"non-deterministic output, min probability {prob.min()}"
    return [layout.decode(o) for o in out]


def grid(**ranges):
    """All combinations of the given register ranges as input dicts."""
    names = list(ranges)
    return [dict(zip(names, combo)) for combo in itertools.product(*ranges.values())]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid.split("::")[0].endswith(ACCEPTANCE_FILE):
        _acceptance[report.nodeid.split("::")[-1]] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.failed and report.nodeid.endswith(ACCEPTANCE_FILE):
        _acceptance[report.nodeid.split("::")[-1]] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in sorted(_acceptance.items()):
        terminalreporter.write_line(f"{status}  {name}")
