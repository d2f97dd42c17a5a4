import re

import pytest
from hypothesis import settings

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")

CRITERIA = {
    1: "public announcement figure and seriality loss",
    2: "arrow update bisimilar to restriction on all small K models",
    3: "reduction axiom validity suites",
    4: "substitution failure of announced content",
    5: "identity-relation speaker equals public arrow update",
    6: "product updates match direct announcement semantics",
    7: "riddle golden runs",
    8: "skeptical riddle replay",
    9: "plausibility suite",
    10: "strict announcement normal forms",
    11: "frame class closure suite",
}

_results = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    hit = re.search(r"test_criterion_(\d+)", report.nodeid)
    if hit is None:
        return
    num = int(hit.group(1))
    if hasattr(report, "wasxfail"):
        status = "xfail" if report.skipped else "xpass"
    elif report.passed:
        status = "passed"
    elif report.failed:
        status = "failed"
    else:
        status = "skipped"
    _results.setdefault(num, []).append(status)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        statuses = _results[num]
        if any(s in ("failed", "xpass") for s in statuses):
            verdict = "FAIL"
        elif any(s == "xfail" for s in statuses):
            verdict = (
                "FAIL as literally stated (documented deviation; "
                "companion checks PASS)"
            )
        else:
            verdict = "PASS"
        terminalreporter.write_line(
            "ACCEPTANCE %02d %s: %s" % (num, CRITERIA.get(num, ""), verdict)
        )
