"""
Fixtures compartidas de las pruebas.
"""
import numpy as np
import pytest

from heurlink.application.services.graph_ops import build_graph, set_num_threads
from heurlink.application.services.synthetic import generate_random_graph


@pytest.fixture(autouse=True)
def single_thread():
    set_num_threads(1)
    yield
    set_num_threads(1)


@pytest.fixture
def triangle():
    return build_graph([(0, 1), (1, 2), (0, 2)], 3)


@pytest.fixture
def single_edge():
    return build_graph([(0, 1)], 2)


@pytest.fixture
def path3():
    return build_graph([(0, 1), (1, 2)], 3)


@pytest.fixture
def star():
    return build_graph([(0, k) for k in range(1, 6)], 6)


@pytest.fixture
def small_random():
    return generate_random_graph(15, 30, seed=3)


@pytest.fixture
def random_graphs():
    return [generate_random_graph(n, m, seed=s) for s, (n, m) in enumerate([(8, 10), (12, 20), (20, 45)])]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
