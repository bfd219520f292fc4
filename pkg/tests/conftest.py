"""Collects per-criterion outcomes from tests marked ``criterion(n, "title")``."""

from collections import OrderedDict

import pytest

_OUTCOMES = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        key = mark.args[0]
        entry = _OUTCOMES.setdefault(key, {"title": mark.args[1], "passed": 0, "failed": []})
        if report.passed:
            entry["passed"] += 1
        elif report.failed:
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_OUTCOMES):
        e = _OUTCOMES[key]
        status = "FAIL" if e["failed"] else "PASS"
        total = e["passed"] + len(e["failed"])
        tr.write_line(f"criterion {key:>2}: {status}  {e['title']}  ({e['passed']}/{total} checks)")
        for name in e["failed"]:
            tr.write_line(f"               failed: {name}")
