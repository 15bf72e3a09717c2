from __future__ import annotations

import pytest
from hypothesis import settings

from adefans.rootsys import parse_system

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def systems():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = parse_system(name)
        return cache[name]
    return get


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    mark = getattr(report, "criterion", None)
    if mark is None:
        return
    n, title = mark
    failed = report.failed or (report.when == "call" and not report.passed)
    prev = _CRITERIA.get(n, (title, True, 0.0))
    dur = prev[2] + (report.duration if report.when == "call" else 0.0)
    _CRITERIA[n] = (title, prev[1] and not failed and not report.skipped, dur)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, dur = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({dur:.1f} s)")
