import acceptance_report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # verdict lines are emitted here, outside capture, so every run mode
    # shows one line per acceptance criterion
    if acceptance_report.LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(acceptance_report.LINES):
            terminalreporter.write_line(line)
