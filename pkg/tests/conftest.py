import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def two_interfaces():
    """Interfaces at x = 1, 2 with r = 0.5 at both."""
    from imptransform import LayerStack
    return LayerStack.from_tau_r([2.0, 2.0], [0.5, 0.5], zeta_minus=1.0)


@pytest.fixture
def single_interface():
    """Impedance 1 -> 3 at x = 1, so r = -1/2."""
    from imptransform import LayerStack
    return LayerStack(np.array([1.0]), np.array([1.0, 3.0]))


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""
    def record(number, title, ok, detail, informational=False):
        tag = "INFO" if informational else ("PASS" if ok else "FAIL")
        line = f"[{tag}] criterion {number}: {title} -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        if not informational:
            assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
