import os

import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        note = getattr(item, "criterion_note", "")
        _results[num] = (status, title, note)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        status, title, note = _results[num]
        line = f"[{status}] {num}. {title}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)


@pytest.fixture
def note(request):
    """Attach a short measured value to the criterion summary line."""

    def _note(text):
        request.node.criterion_note = text

    return _note


def fullscale_enabled():
    return os.environ.get("ONEBIT_FULLSCALE") == "1"
