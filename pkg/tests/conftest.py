import pytest

from gridspect import synthmaps
from gridspect.grid_map import BinaryMap


@pytest.fixture(scope="session")
def office():
    return synthmaps.office_map()


@pytest.fixture(scope="session")
def rect128():
    return synthmaps.rectangle_map(side=128)


@pytest.fixture(scope="session")
def rect128_rot30():
    return synthmaps.rectangle_map(side=128, angle_deg=30.0)


@pytest.fixture(scope="session")
def corpus():
    return synthmaps.bundled_corpus()


def random_binary_map(rng, side, density=0.3) -> BinaryMap:
    bits = rng.random((side, side)) < density
    return BinaryMap(width=side, height=side, bits=bits)
