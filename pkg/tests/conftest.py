import re

import pytest

from mechlab.distributions import Power, Tabulated, Uniform

_criteria = {}


@pytest.fixture(scope="session")
def uniform():
    return Uniform()


@pytest.fixture(scope="session")
def power2():
    return Power(2.0)


@pytest.fixture(scope="session")
def tabulated():
    # convex cdf, so the piecewise-constant density is increasing and regular
    return Tabulated.from_distribution(Power(1.5), m=40)


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.failed:
        detail = dict(report.user_properties).get("detail", "")
        prev = _criteria.get(n)
        ok = report.passed and (prev is None or prev[0])
        details = [x for x in ((prev[1] if prev else ""), detail) if x]
        _criteria[n] = (ok, "; ".join(details))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok, detail = _criteria[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(f"{line}  {detail}" if detail else line)
