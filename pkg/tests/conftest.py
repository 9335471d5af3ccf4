import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polarins import harness, trajgen

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def southward_reports():
    return {r.mechanization: r for r in
            harness.run_scenario(trajgen.scenario_southward(), "both", "scenario1")}


@pytest.fixture(scope="session")
def transpolar_reports():
    return {r.mechanization: r for r in
            harness.run_scenario(trajgen.scenario_transpolar(), "both", "scenario2")}


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


_ACCEPTANCE = {}


@pytest.fixture
def verdict():
    """Record one pass/fail line for an acceptance criterion, then assert it."""
    def record(number, title, ok, detail):
        line = "criterion {} {:<4} {}: {}".format(number, "PASS" if ok else "FAIL", title, detail)
        _ACCEPTANCE[number] = line
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
