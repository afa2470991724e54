import sys
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "qcorr", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("qcorr")


@pytest.fixture(scope="session")
def reference_runs():
    """In-memory Lindblad runs of the four bundled reference configurations.

    ``get(name)`` returns (config, (tables, diagnostics, peaks), seconds).
    """
    from qcorr.cli.config import bundled_config_path, load_config
    from qcorr.cli.runner import evaluate

    cache = {}

    def get(name):
        if name not in cache:
            cfg = load_config(bundled_config_path(f"{name}.cfg"))
            start = time.perf_counter()
            result = evaluate(cfg)
            cache[name] = (cfg, result, time.perf_counter() - start)
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        terminalreporter.write_line(mod.RESULTS.get(n, f"criterion {n:2d}: FAIL  (no verdict: deselected or errored)"))
    runs = mod.VALIDITY
    if len(runs) == 4:
        ok = all(v[0] for v in runs.values())
        detail = "; ".join(v[1] for v in runs.values())
        terminalreporter.write_line(f"criterion 11: {'PASS' if ok else 'FAIL'}  {detail}")
    else:
        terminalreporter.write_line(f"criterion 11: FAIL  (only {len(runs)} of 4 reference runs checked)")
