import numpy as np
import pytest

from stiefelcast.verify import random_graph, random_orthonormal


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def graph8(rng):
    return random_graph(rng, 8)


__all__ = ["random_graph", "random_orthonormal"]
