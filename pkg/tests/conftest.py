ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    ACCEPTANCE_LINES.append((criterion, f"{'PASS' if ok else 'FAIL'}  criterion {criterion:>2}: {detail}"))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
