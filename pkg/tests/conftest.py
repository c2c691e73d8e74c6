import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """One visible pass/fail line per acceptance criterion."""
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        terminal = item.config.pluginmanager.get_plugin("terminalreporter")
        if terminal is not None:
            status = "PASS" if report.passed else "FAIL"
            terminal.write_line(f"[acceptance] {item.name}: {status}")
