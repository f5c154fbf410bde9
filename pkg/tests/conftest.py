import numpy as np
import pytest

from polya_cert.geometry import (
    equilateral_triangle,
    rectangle,
    regular_polygon,
    unit_square,
)


@pytest.fixture(scope="session")
def square():
    return unit_square()


@pytest.fixture(scope="session")
def hexagon():
    # regular hexagon with side length 1 (side == circumradius)
    return regular_polygon(6, 1.0)


@pytest.fixture(scope="session")
def rect21():
    return rectangle(2.0, 1.0)


@pytest.fixture(scope="session")
def triangle():
    return equilateral_triangle(1.0)


@pytest.fixture(scope="session")
def disk256():
    return regular_polygon(256, 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
