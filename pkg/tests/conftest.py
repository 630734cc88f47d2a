import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary prints them after the run."""
    def record(number, ok, detail):
        _RESULTS.append((number, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_RESULTS):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
