import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label, limit): acceptance criterion tag, limit in seconds")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    mark = getattr(report, "criterion", None)
    if mark is None:
        return
    number, label, limit = mark
    entry = _criteria.setdefault(str(number), {"label": label, "ok": True, "seconds": 0.0, "limit": limit})
    entry["ok"] &= report.outcome == "passed"
    entry["seconds"] += report.duration


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=_order):
        e = _criteria[number]
        slow = e["seconds"] > e["limit"]
        verdict = "PASS" if e["ok"] and not slow else "FAIL"
        note = f", over the {e['limit']:g} s limit" if slow else ""
        terminalreporter.write_line(f"{verdict} criterion {number:>3}: {e['label']} ({e['seconds']:.1f} s{note})")


def _order(number: str):
    digits = "".join(ch for ch in number if ch.isdigit())
    return int(digits), number
