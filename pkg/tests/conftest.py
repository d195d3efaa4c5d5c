import time
from contextlib import contextmanager

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

XI = -1.0 / np.pi
_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def xi():
    return XI


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion.

    Yields a dict for measured quantities; ``spent`` adds time already used
    by shared fixtures to the runtime budget check.
    """
    @contextmanager
    def run(number, title, limit, spent=0.0):
        notes = {}
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield notes
            elapsed = time.perf_counter() - t0 + spent
            notes["runtime_s"] = round(elapsed, 2)
            assert elapsed < limit, f"runtime {elapsed:.1f} s over the {limit} s budget"
            status = "PASS"
        finally:
            notes.setdefault("runtime_s", round(time.perf_counter() - t0 + spent, 2))
            detail = " ".join(f"{k}={_fmt(v)}" for k, v in notes.items())
            line = f"criterion {number:>2} {status}: {title} [{detail}]"
            request.config.stash.setdefault(_VERDICTS, []).append(line)
    return run


def _fmt(v):
    return f"{v:.3g}" if isinstance(v, float) else str(v)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
