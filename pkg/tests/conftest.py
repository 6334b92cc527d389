import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with a detail string once checks pass."""
    number, title = request.node.get_closest_marker("criterion").args
    entry = {"number": number, "title": title, "detail": "", "status": "FAIL"}
    _ACCEPTANCE.append(entry)

    def passed(detail="", status="PASS"):
        entry["detail"] = detail
        entry["status"] = status

    return passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for e in sorted(_ACCEPTANCE, key=lambda e: (e["number"], e["title"])):
        line = f"{e['status']:<4} [{e['number']:>2}] {e['title']}"
        if e["detail"]:
            line += f" -- {e['detail']}"
        terminalreporter.write_line(line)
