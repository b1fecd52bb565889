import numpy as np
import pytest

_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def verdict(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(number, title, checks, elapsed, limit):
        timed = elapsed < limit
        ok = all(checks.values()) and timed
        parts = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
        line = (f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {parts}; "
                f"{elapsed:.2f}s of {limit:g}s{'' if timed else ' (too slow)'}")
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
