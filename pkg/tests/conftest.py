import re

import pytest

_CRITERIA: dict[str, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = re.match(r"test_criterion_(\d+\w?)", item.name)
    if not m or report.when != "call" and report.passed:
        return
    title = (item.function.__doc__ or item.name).strip().splitlines()[0]
    detail = ""
    for line in report.capstdout.splitlines():
        if line.startswith("criterion "):
            detail = line.split("  ", 1)[-1]
    verdict = "PASS" if report.passed else "FAIL"
    _CRITERIA[m.group(1)] = (title, verdict, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        title, verdict, detail = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key.lstrip('0'):>3}: {verdict}  {title}: {detail}")
