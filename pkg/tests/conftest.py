import numpy as np
import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            number, title = m.args
            _CRITERIA.setdefault(number, {"title": title, "outcomes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    entry = _CRITERIA[m.args[0]]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["outcomes"].append("SKIP" if report.skipped else ("PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outs = entry["outcomes"]
        if not outs:
            status = "NOT RUN"
        elif "FAIL" in outs:
            status = "FAIL"
        elif all(o == "SKIP" for o in outs):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"AC{number:<2} {status:<7} {entry['title']}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
