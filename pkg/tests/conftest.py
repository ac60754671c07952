import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one numbered acceptance criterion for the summary."""

    def record(number: int, title: str):
        _CRITERIA[number] = (title, request.node.nodeid)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", "call") == "call" or key != "passed":
                outcomes[rep.nodeid] = "PASS" if key == "passed" else "FAIL"
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, nodeid = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {outcomes.get(nodeid, 'FAIL')}  {title}")
