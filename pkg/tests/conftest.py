import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from gipsy import Engine, compile_source  # noqa: E402

# criterion number -> title, filled in by the acceptance module
CRITERIA: dict[int, str] = {}
_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            CRITERIA[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n = report.user_properties and dict(report.user_properties).get("criterion")
        if n:
            if report.outcome != "skipped":  # negative cases with nothing to check
                _outcomes.setdefault(n, []).append(report.outcome == "passed")


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_makereport(item, call):
    m = item.get_closest_marker("criterion")
    if m and ("criterion", m.args[0]) not in item.user_properties:
        item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        tr.write_line(f"criterion {n:2d}: {status}  {CRITERIA[n]}")


def evaluate(source, dialect=None, **engine_opts):
    """Compile and run; returns (values, report, engine)."""
    prog = compile_source(source, dialect=dialect)
    with Engine(**engine_opts) as engine:
        report = engine.run(prog)
    if report.errors:
        raise report.errors[0][1]
    return [v for _, v in report.results], report, engine


@pytest.fixture
def run_program():
    return evaluate
