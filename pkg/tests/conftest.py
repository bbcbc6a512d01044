"""Shared fixtures: collects acceptance checklist lines for the run summary."""

import pytest


class _Checklist:
    def __init__(self):
        self.lines = []


_checklist = _Checklist()


@pytest.fixture(scope="session")
def acceptance_checklist():
    return _checklist


def pytest_terminal_summary(terminalreporter):
    if _checklist.lines:
        terminalreporter.section("acceptance checklist")
        for line in _checklist.lines:
            terminalreporter.write_line(line)
