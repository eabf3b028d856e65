# pyright: reportUnusedFunction=false
import pytest

from .fakes import FakeNetwork


@pytest.fixture
def net() -> FakeNetwork:
    return FakeNetwork()
