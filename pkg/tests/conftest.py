"""Per-criterion PASS/FAIL summary for the acceptance suite."""

import pytest

_OUTCOMES = {}
_TITLES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion id")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    _TITLES[number] = title
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        _OUTCOMES.setdefault(number, []).append((item.name, not failed))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        results = _OUTCOMES[number]
        ok = all(passed for _, passed in results)
        failing = [name for name, passed in results if not passed]
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {_TITLES[number]}"
        if failing:
            line += f"  (failing: {', '.join(failing)})"
        tr.write_line(line)
