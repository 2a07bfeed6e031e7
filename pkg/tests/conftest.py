"""Shared pytest hooks.

The acceptance suite records one result per criterion; print them in the
terminal summary so every run ends with an explicit pass/fail line per
criterion regardless of output capture.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in results:
        tag = "PASS" if ok else "FAIL"
        line = f"{tag} {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
