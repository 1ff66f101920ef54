import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # Print one pass/fail line per acceptance criterion after the run.
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod is not None else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results:
        terminalreporter.write_line(line)
