import numpy as np
import pytest

from polyagent.poly import FinCategory, FinSet, Polynomial, monomial
from polyagent.scenario import bundled


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_y():
    return monomial(FinSet(("a", "b")), FinSet(("*",)))


@pytest.fixture
def y2_plus_1():
    return Polynomial.from_dict({"u": ["l", "r"], "v": []})


@pytest.fixture
def walking_arrow():
    return FinCategory(
        FinSet(("X", "Y")),
        (("id_X", "X", "X"), ("id_Y", "Y", "Y"), ("f", "X", "Y")),
        {"X": "id_X", "Y": "id_Y"},
        {},
    )


@pytest.fixture
def scenario_path():
    return lambda name: str(bundled(name))
