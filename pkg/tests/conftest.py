import pytest

from graphmodel import graph_from_matrix
from helpers import CANONICAL_EDGES
from model import PerfectMatching
from skewmatrix import random_instance


@pytest.fixture
def canonical_matrix():
    return random_instance(4, 1, edge_set=CANONICAL_EDGES, seed=3)

@pytest.fixture
def canonical_graph(canonical_matrix):
    return graph_from_matrix(canonical_matrix)

@pytest.fixture
def m0():
    return PerfectMatching.from_text("1-4,2-3")
