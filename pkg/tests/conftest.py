import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_results = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        _results[name] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    from test_acceptance import CRITERIA
    terminalreporter.section("acceptance criteria")
    for name, title in CRITERIA.items():
        if name in _results:
            status = "PASS" if _results[name] else "FAIL"
            terminalreporter.write_line(f"{status}  {title}")
