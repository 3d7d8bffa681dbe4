import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body sets ``.passed`` on success."""

    class Line:
        passed = False
        detail = ""

    line = Line()
    yield line
    _ACCEPTANCE.append((request.node.name, line.passed, line.detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
