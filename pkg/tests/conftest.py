import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

N_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)
LAM_GRID = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
T_GRID = np.array([0.0, 0.1, 0.5, 1.0, 2.0, 5.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}
ACCEPTANCE_COUNT = 15


def record(k: int, ok: bool, detail: str):
    line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE[k] = line
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    failed = {r.nodeid for r in terminalreporter.stats.get("failed", [])}
    ran = [r for key in ("passed", "failed") for r in terminalreporter.stats.get(key, [])
           if "test_acceptance.py" in r.nodeid]
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, ACCEPTANCE_COUNT + 1):
        if k in ACCEPTANCE:
            line = ACCEPTANCE[k]
        elif any(f"test_criterion_{k:02d}_" in nid for nid in failed):
            line = f"criterion {k:2d} FAIL: raised before reporting"
        else:
            line = f"criterion {k:2d} NOT RUN"
        terminalreporter.write_line(line)
