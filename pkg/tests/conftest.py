"""Shared test configuration: acceptance summary lines and hypothesis profile."""

import numpy as np
import pytest

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "package",
        max_examples=100,
        deadline=None,
        derandomize=True,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("package")
except ImportError:
    pass

# (criterion label, passed, detail) tuples appended by test_acceptance.py.
ACCEPTANCE_RESULTS = []


def record_acceptance(label, passed, detail):
    ACCEPTANCE_RESULTS.append((label, bool(passed), detail))
    status = "PASS" if passed else "FAIL"
    print(f"[{status}] {label}: {detail}")
    assert passed, f"{label}: {detail}"


@pytest.fixture
def rng():
    return np.random.default_rng(20260821)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}: {detail}")
