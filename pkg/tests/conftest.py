import pytest

from qgcipher.quasigroup import generate_table, invert_table

# The order-6 example quasigroup and its inverse, shifted to 0-based symbols.
TABLE_I_1BASED = [
    [1, 3, 2, 6, 4, 5],
    [2, 6, 4, 5, 1, 3],
    [3, 2, 6, 4, 5, 1],
    [4, 5, 1, 3, 2, 6],
    [5, 1, 3, 2, 6, 4],
    [6, 4, 5, 1, 3, 2],
]
TABLE_II_1BASED = [
    [1, 3, 2, 5, 6, 4],
    [5, 1, 6, 3, 4, 2],
    [6, 2, 1, 4, 5, 3],
    [3, 5, 4, 1, 2, 6],
    [2, 4, 3, 6, 1, 5],
    [4, 6, 5, 2, 3, 1],
]
TABLE_I = [[v - 1 for v in row] for row in TABLE_I_1BASED]
TABLE_II = [[v - 1 for v in row] for row in TABLE_II_1BASED]

EXAMPLE_SEED = 3 - 1
EXAMPLE_PLAIN = [v - 1 for v in (1, 5, 4, 2, 6, 4, 5, 3)]
EXAMPLE_CIPHER = [v - 1 for v in (3, 5, 2, 6, 2, 5, 6, 5)]

FIXTURE_GEN_SEED = 0x000000000000002A


@pytest.fixture(scope="session")
def table256():
    return generate_table(256, FIXTURE_GEN_SEED)


@pytest.fixture(scope="session")
def inv256(table256):
    return invert_table(table256)


# -- acceptance reporting ---------------------------------------------------

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    _criteria.append((number, title, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict in sorted(_criteria):
        terminalreporter.write_line(f"AC{number:<3} {verdict}  {title}")
