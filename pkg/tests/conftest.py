import pytest
from hypothesis import HealthCheck, settings

from edgedom import constructions as C

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def fano():
    return C.pg_points_kspaces(2, 2, 1)


@pytest.fixture(scope="session")
def pg24():
    return C.pg_points_kspaces(2, 4, 1)


@pytest.fixture(scope="session")
def pg32_lines():
    return C.pg_points_kspaces(3, 2, 1)


@pytest.fixture(scope="session")
def hd9():
    return C.paley_hadamard_design(9)


@pytest.fixture(scope="session")
def bush2():
    return C.bush_type_hadamard(2)


# one summary line per acceptance criterion, with the values it reported

_criteria: dict[int, tuple[str, str, list]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    status = "PASS" if rep.passed else "FAIL"
    if number in _criteria and _criteria[number][1] == "FAIL":
        return
    _criteria[number] = (title, status, list(item.user_properties))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_criteria):
        title, status, props = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
        for key, value in props:
            terminalreporter.write_line(f"    {key}: {value}")
