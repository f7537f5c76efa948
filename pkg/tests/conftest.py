import pytest

from towerlab.towergen import default_family, default_singer, q5_instance


@pytest.fixture(scope="session")
def q5():
    return q5_instance()


@pytest.fixture(scope="session")
def sd5(q5):
    return q5.sd


@pytest.fixture(scope="session")
def family7():
    return default_family(7)


@pytest.fixture(scope="session")
def singer_by_q():
    cache = {}

    def get(q):
        if q not in cache:
            from towerlab.ffield import prime_power
            cache[q] = default_singer(*prime_power(q))
        return cache[q]

    return get


# one pass/fail line per acceptance criterion, in the terminal summary

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    num = int(name.split("_")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[num] = (name, "PASS" if report.outcome == "passed" else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        name, outcome = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {outcome}  {name}")
