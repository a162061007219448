import numpy as np
import pytest

from mqent.qstate import named_state, product

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def record(number, title, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def four_qubit_states():
    return {
        "ghz4": named_state("ghz:4"),
        "w4": named_state("w:4"),
        "phi6": named_state("dicke:4:2"),
        "phi4": named_state("phi4cluster"),
    }


@pytest.fixture(scope="session")
def bell_bell():
    return product(named_state("bell:1"), named_state("bell:1"))


@pytest.fixture(scope="session")
def ghz3_zero():
    return product(named_state("ghz:3"), named_state("basis:0"))


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
