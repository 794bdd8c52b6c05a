import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in order."""
    lines = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance.py::test_criterion_" not in getattr(rep, "nodeid", "") or rep.when != "call":
                continue
            props = dict(rep.user_properties)
            lines.append((props.get("criterion", rep.nodeid), "PASS" if rep.passed else "FAIL", props.get("measured", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, status, measured in sorted(lines, key=lambda x: (isinstance(x[0], str), x[0])):
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {measured}")
