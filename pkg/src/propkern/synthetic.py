"""Small generated graph databases for demos and tests."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import Graph, GraphDatabase


def sbm_graph(labels, p_in: float, p_out: float, rng: np.random.Generator, graph_class=None) -> Graph:
    """Undirected stochastic block model where the node labels are the blocks."""
    labels = np.asarray(labels)
    n = labels.size
    same = labels[:, None] == labels[None, :]
    prob = np.where(same, p_in, p_out)
    upper = np.triu(rng.random((n, n)) < prob, 1)
    A = sp.csr_matrix((upper | upper.T).astype(np.float64))
    return Graph(A, labels, graph_class=graph_class)


def two_class_sbm(n_per_class: int = 60, n_nodes: int = 20, k: int = 3, seed: int = 0,
                  assortative=(0.5, 0.05), disassortative=(0.05, 0.5)) -> GraphDatabase:
    """Two classes with identical label histograms but different label arrangements.

    Class 0 connects mostly within label blocks, class 1 mostly across them.
    With ``k=2`` and balanced labels the two classes are label-swapped mirror
    images of each other, which no label-histogram kernel can separate; hence
    the default ``k=3``.
    """
    rng = np.random.default_rng(seed)
    labels = np.arange(n_nodes) % k
    graphs = []
    for cls, (p_in, p_out) in enumerate((assortative, disassortative)):
        for _ in range(n_per_class):
            graphs.append(sbm_graph(rng.permutation(labels), p_in, p_out, rng, cls))
    return GraphDatabase(graphs, k)


def random_database(rng: np.random.Generator, n_graphs=5, max_nodes=12, k=3, p_edge=0.3,
                    p_unlabeled=0.0, directed=False, weighted=False, attr_dim=0) -> GraphDatabase:
    graphs = []
    for _ in range(n_graphs):
        n = int(rng.integers(1, max_nodes + 1))
        M = rng.random((n, n)) < p_edge
        np.fill_diagonal(M, False)
        if not directed:
            M = np.triu(M, 1)
            M = M | M.T
        W = M * (rng.uniform(0.5, 2.0, (n, n)) if weighted else 1.0)
        if weighted and not directed:
            W = np.triu(W, 1)
            W = W + W.T
        labels = rng.integers(0, k, n)
        labels[rng.random(n) < p_unlabeled] = -1
        attrs = rng.normal(size=(n, attr_dim)) if attr_dim else None
        graphs.append(Graph(sp.csr_matrix(W), labels, attrs, int(rng.integers(0, 2))))
    return GraphDatabase(graphs, k)
