"""Keeps the tests directory importable (helpers, oracles)."""

# Verdict lines appended by test_acceptance; echoed after the run so the
# gate readout survives pytest's output capture.
GATE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if GATE_LINES:
        terminalreporter.section("acceptance gate")
        for line in GATE_LINES:
            terminalreporter.write_line(line)
