import os
import sys
import time
from contextlib import contextmanager

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per criterion, with a time limit."""
    lines = request.config.stash[_LINES]

    @contextmanager
    def check(num: int, title: str, limit: float):
        info = {"detail": ""}
        t0 = time.perf_counter()
        try:
            yield info
        except BaseException as e:
            elapsed = time.perf_counter() - t0
            lines.append(f"criterion {num:2d}  FAIL  {title} ({elapsed:.1f}s): {e!r}"[:300])
            raise
        elapsed = time.perf_counter() - t0
        ok = elapsed < limit
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d}  {verdict}  {title} ({elapsed:.1f}s < {limit:g}s) {info['detail']}"
        lines.append(line.rstrip())
        print(line)
        assert ok, f"took {elapsed:.1f}s, limit {limit}s"

    return check
