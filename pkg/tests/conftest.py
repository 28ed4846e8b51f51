import pytest

from ununfold.constructions import StackedHatSpec, acute_hat, caltrop, flat_hat, stacked_hat
from ununfold.verify import verify_hat_no_single_piece

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    prev = _CRITERIA.get(number, (title, True))
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    _CRITERIA[number] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}")


@pytest.fixture(scope="session")
def acute():
    return acute_hat()[0]


@pytest.fixture(scope="session")
def stacked():
    return stacked_hat(StackedHatSpec())[0]


@pytest.fixture(scope="session")
def flat():
    return flat_hat()


@pytest.fixture(scope="session")
def caltrop_mesh():
    return caltrop()


@pytest.fixture(scope="session")
def acute_report(acute):
    return verify_hat_no_single_piece(acute, mode="interval")


@pytest.fixture(scope="session")
def stacked_report(stacked):
    return verify_hat_no_single_piece(stacked, mode="interval")


@pytest.fixture(scope="session")
def flat_report(flat):
    return verify_hat_no_single_piece(flat, mode="interval")
