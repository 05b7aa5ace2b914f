"""
pytest 共享夹具
"""
import pytest

from curves import core_curve
from fixture_store import store


@pytest.fixture
def or2():
    return store.load_configuration('cfg-or2')


@pytest.fixture
def no2():
    return store.load_configuration('cfg-no2')


@pytest.fixture
def mob():
    return store.load_configuration('cfg-mob')


@pytest.fixture
def bad_parity():
    return store.load_configuration('bad-parity')


@pytest.fixture
def or2_b(or2):
    return core_curve(or2, 'b')


@pytest.fixture
def no2_a(no2):
    return core_curve(no2, 'a')
