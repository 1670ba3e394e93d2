"""Shared maps and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import pytest

from lemniscope.polyfield import Polynomial as P
from lemniscope.qdmodel import RationalMap

# ascending coefficients
MAPS = {
    "z2-1": RationalMap(P((-1, 0, 1))),
    "z3-3z": RationalMap(P((0, -3, 0, 1))),
    "e44": RationalMap(P.from_roots([1, -1, 2, -2])),
    "t4": RationalMap(P((1, 0, -8, 0, 8))),
    "rat": RationalMap(P((-1, 0, 1)), P((1, 0, 1))),
    "rat2": RationalMap(P((-4, 0, 1)), P((1, 0, 1))),
    "rat3": RationalMap(P((-1, 0, 1)), P((1, 1, 1))),
}


@pytest.fixture(scope="session")
def maps():
    return MAPS


_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when != "call" and report.outcome == "passed":
        return
    lines = [l for l in report.capstdout.splitlines() if l.startswith("criterion ")]
    if lines:
        _ACCEPTANCE[name] = lines[-1]
    else:
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE.setdefault(name, f"criterion {name.split('_')[2]}: {verdict}  ({report.when} {report.outcome})")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[2])):
        terminalreporter.write_line(_ACCEPTANCE[name])
