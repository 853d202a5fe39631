"""Shared pytest wiring: prints the acceptance scorecard after the run."""

from __future__ import annotations


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from tests.test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance scorecard")
        for line in RESULTS:
            terminalreporter.write_line(line)
