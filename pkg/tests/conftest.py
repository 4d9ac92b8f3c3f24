"""Per-criterion pass/fail summary for the acceptance suite.

A criterion passes when every test marked with its number passes.
"""

import pytest

_outcomes: dict[int, list[bool]] = {}
_titles: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number = marker.args[0]
    if len(marker.args) > 1:
        _titles[number] = marker.args[1]
    # A failure in setup or teardown counts; a pass only counts from the call phase.
    if report.failed or (report.when == "call"):
        _outcomes.setdefault(number, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        status = "PASS" if all(_outcomes[number]) else "FAIL"
        title = _titles.get(number, "")
        terminalreporter.write_line(f"criterion {number}: {status}" + (f"  {title}" if title else ""))
