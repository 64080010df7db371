import time

import pytest

SESSION = {}


def pytest_sessionstart(session):
    SESSION["start"] = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # acceptance last, so its runtime criterion sees the whole session
    items.sort(key=lambda item: item.module.__name__.endswith("test_acceptance"))


@pytest.fixture
def session_elapsed():
    return lambda: time.perf_counter() - SESSION["start"]
