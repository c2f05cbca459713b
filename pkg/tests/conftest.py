import pytest

from helpers import BENCH


@pytest.fixture
def bench_params():
    return BENCH


# -- acceptance summary ---------------------------------------------------------

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _RESULTS.get(number, (title, True))
        _RESULTS[number] = (title, prev[1] and rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok = _RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] AC{number:>2}  {title}")
