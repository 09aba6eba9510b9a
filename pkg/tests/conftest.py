"""Shared pytest wiring.

The acceptance tests record one verdict line per criterion here; the
terminal-summary hook replays them after capture ends so the verdicts
are visible in every run, not just on failure.
"""

ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
