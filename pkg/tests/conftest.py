import time

import numpy as np
import pytest

from gappydmap import datagen, workflows

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    _CRITERIA[number] = (title, report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome, duration = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  ({duration:.1f} s)  {title}")


class Stopwatch:
    def __init__(self):
        self.start = time.perf_counter()

    @property
    def elapsed(self):
        return time.perf_counter() - self.start


# shared fixtures for the unit tests (acceptance tests build their own data so
# that their runtimes are measured end to end)


@pytest.fixture(scope="session")
def slow_data():
    X, P = datagen.generate_slow_manifold(0.01, 1000, 0, return_params=True)
    return X.data, P.params


@pytest.fixture(scope="session")
def surrogate_data():
    P = datagen.cvd_parameter_grid(720)
    X = datagen.generate_surrogate_cvd(P, 200, 1)
    return X.data, P.params


@pytest.fixture(scope="session")
def surrogate_split(surrogate_data):
    X, P = surrogate_data
    train, test = workflows.holdout_split(len(X), 0.1, 0)
    return X[train], P[train], X[test], P[test]


@pytest.fixture(scope="session")
def surrogate_pipeline(surrogate_split):
    X_train, P_train, _, _ = surrogate_split
    return workflows.fit_pipeline(X_train, P_train, partial_size=7)


@pytest.fixture(scope="session")
def slow_split(slow_data):
    X, P = slow_data
    train, test = workflows.holdout_split(len(X), 0.1, 0)
    return X[train], P[train], X[test], P[test]


@pytest.fixture(scope="session")
def slow_pipeline(slow_split):
    X_train, P_train, _, _ = slow_split
    return workflows.fit_pipeline(X_train, P_train)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
