import os

import pytest
from hypothesis import HealthCheck, settings

from harmcalc import scenario

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def load():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = scenario.load(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def treatments(load):
    return load("treatments")


@pytest.fixture(scope="session")
def tipping(load):
    return load("tipping")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
