import pytest

_LINES = []


@pytest.fixture
def record():
    """Log one PASS/FAIL line for an acceptance criterion."""
    def log(number, ok, detail=""):
        _LINES.append((number, f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"))
        return ok
    return log


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
