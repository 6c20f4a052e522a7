import os
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA = defaultdict(list)


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records one outcome for the acceptance summary."""
    def record(k: int, ok: bool, detail: str) -> bool:
        _CRITERIA[k].append((bool(ok), detail))
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        parts = _CRITERIA[k]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {verdict}  " + "; ".join(d for _, d in parts))
