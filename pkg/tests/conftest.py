"""Shared fixtures and the acceptance-criteria summary lines."""

from __future__ import annotations

import re

import pytest

from obameter import KeywordTaxonomy, demo_taxonomy

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results: dict[int, str] = {}


@pytest.fixture(scope="session")
def taxonomy() -> KeywordTaxonomy:
    return demo_taxonomy()


@pytest.fixture(scope="session")
def tiny_taxonomy() -> KeywordTaxonomy:
    # depth 3: root, two branches, two leaves under one branch
    return KeywordTaxonomy.from_edges([
        ("top", "-"),
        ("animals", "top"),
        ("plants", "top"),
        ("dogs", "animals"),
        ("cats", "animals"),
    ])


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call":
        _results[num] = "PASS" if report.passed else "FAIL"
    elif report.failed:  # setup or teardown error
        _results[num] = "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        terminalreporter.write_line(f"criterion {num}: {_results[num]}")
