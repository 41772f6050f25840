import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the end-of-run summary."""
    def record(number, title, ok, detail=""):
        if number in _RESULTS:
            _, prev_ok, prev_detail = _RESULTS[number]
            ok, detail = prev_ok and ok, "; ".join(d for d in (prev_detail, detail) if d)
        _RESULTS[number] = (title, ok, detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, detail = _RESULTS[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
