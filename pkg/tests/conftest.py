"""Shared pytest hooks for the suite.

The acceptance module records one verdict line per release criterion;
echo them in the terminal summary so a full run always ends with an
explicit [PASS]/[FAIL] line for each criterion, independent of output
capturing.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
