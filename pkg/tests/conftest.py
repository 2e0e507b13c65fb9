from __future__ import annotations

import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")
    config.acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    results = item.config.acceptance_results
    if rep.when == "call" or number not in results:
        results[number] = (title, rep.passed, detail)


@pytest.fixture
def record(request):
    """``record(key, value)`` attaches a detail to the criterion summary line."""
    return lambda key, value: request.node.user_properties.append((key, value))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.acceptance_results
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed, detail = results[number]
        line = f"AC{number:<2} {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
