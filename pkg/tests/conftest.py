import pytest

from zetalab.core.config import RunConfig, activate_settings
from zetalab.services.arith_sieve import build_table


@pytest.fixture(autouse=True)
def test_settings():
    """Fresh settings for every test, single-threaded unless a test says otherwise"""
    config = RunConfig(THREADS=1, PERIODIC_TERMS=200_000)
    activate_settings(config)
    yield config
    activate_settings(None)


@pytest.fixture(scope="session")
def small_table():
    return build_table(10_000)


@pytest.fixture(scope="session")
def medium_table():
    return build_table(100_000)


@pytest.fixture(scope="session")
def large_table():
    return build_table(1_000_000)
