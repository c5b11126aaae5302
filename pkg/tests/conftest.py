"""
共用測試 fixture
"""
import pytest

from src.di.service_factory import get_service_factory
from src.services.builtin_categories import builtin_pointed_sets, builtin_vect, builtin_zeros


@pytest.fixture(scope="session")
def vect21():
    return builtin_vect(2, 1)


@pytest.fixture(scope="session")
def vect22():
    return builtin_vect(2, 2)


@pytest.fixture(scope="session")
def vect22_nodup():
    return builtin_vect(2, 2, duplicate_zero=False)


@pytest.fixture(scope="session")
def pointed3():
    return builtin_pointed_sets(3)


@pytest.fixture(scope="session")
def zero1():
    return builtin_zeros(1)


@pytest.fixture
def fresh_factory():
    """每個測試使用新的 ServiceFactory 快取"""
    get_service_factory().reset()
    yield
    get_service_factory().reset()
