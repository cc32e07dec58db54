# filled by tests/test_acceptance.py: (criterion, status line, check lines)
ACCEPTANCE_LINES: list[tuple[int, str, list[str]]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, status, details in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(status)
        for line in details:
            terminalreporter.write_line("    " + line)
