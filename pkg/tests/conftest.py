import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("steerkit", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("steerkit")

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    num = dict(report.user_properties).get("criterion")
    if num is None:
        return
    title = dict(report.user_properties)["criterion_title"]
    _CRITERIA[num] = [title, report.outcome]


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", mark.args[0]))
        item.user_properties.append(("criterion_title", mark.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, outcome = _CRITERIA[num]
        tag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{tag}  criterion {num:>2}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)
