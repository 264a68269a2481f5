import pytest

from hxagent.environment.builtin import builtin_suite

FIXTURES = "tests/fixtures"
GOLDEN = "tests/golden"


@pytest.fixture(scope="session")
def suite():
    return builtin_suite()


@pytest.fixture(scope="session")
def search_instance(suite):
    return next(f for f in suite if f.task_id == "search-engine").instances[0]


@pytest.fixture(scope="session")
def tabbed_family(suite):
    return next(f for f in suite if f.task_id == "tabbed-links")
