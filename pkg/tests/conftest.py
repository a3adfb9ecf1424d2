import sys


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for row in mod.format_results(sorted(results, key=lambda r: int(r[0].split()[0]))):
        terminalreporter.write_line(row)
