import numpy as np
import pytest

from propkern.graph import Graph, GraphDatabase


def golden_pair_graphs():
    """The two 6-node example graphs: labels 0/1, -1 for unlabeled."""
    gi = Graph.from_edges(6, [(1, 0), (2, 1), (3, 1), (4, 0), (4, 1), (4, 3), (5, 3)],
                          [0, 0, -1, 1, -1, -1])
    gj = Graph.from_edges(6, [(1, 0), (4, 0), (4, 2), (4, 3), (5, 2), (5, 3)],
                          [-1, 1, 0, -1, 1, 0])
    return GraphDatabase([gi, gj], 2)


def path_graph(labels=None):
    return Graph.from_edges(3, [(0, 1), (1, 2)], labels)


@pytest.fixture
def golden_pair():
    return golden_pair_graphs()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
