import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = getattr(report, "criterion", None)
    if crit is None:
        for key, val in report.user_properties:
            if key == "criterion":
                crit = val
    if crit is not None:
        _acceptance[(crit[0], crit[1])] = ("PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for num, title in sorted(_acceptance):
        status, secs = _acceptance[(num, title)]
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {title}  ({secs:.1f}s)")
