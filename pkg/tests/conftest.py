import pytest

from bnpin import augment, case_study

_CRITERIA: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    detail = "; ".join(str(v) for k, v in report.user_properties if k == "measured")
    _CRITERIA.append((marker.args[0], "PASS" if report.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _CRITERIA:
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def tlgl():
    return case_study("tlgl")


@pytest.fixture(scope="session")
def tcell():
    return case_study("tcell")


@pytest.fixture(scope="session")
def bn5():
    return case_study("bn5")


@pytest.fixture(scope="session")
def tlgl_aug(tlgl):
    return augment(tlgl)


@pytest.fixture(scope="session")
def tcell_aug(tcell):
    return augment(tcell)
