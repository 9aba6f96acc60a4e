import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from propkern.graph import (Graph, GraphDatabase, absorbing_transition, build_transition, degree_labels,
                            init_label_distributions, stack_database)
from propkern.propagation import diffusion_step

from conftest import path_graph


def dense_normalize(A):
    A = np.asarray(A, dtype=float)
    out = A.copy()
    for i, s in enumerate(A.sum(axis=1)):
        if s == 0:
            out[i] = 0
            out[i, i] = 1
        else:
            out[i] /= s
    return out


def test_path_transition_matches_dense_oracle():
    T = build_transition(path_graph().adjacency).toarray()
    A = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    np.testing.assert_array_equal(T, dense_normalize(A))
    np.testing.assert_array_equal(T, [[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]])


def test_isolated_node_gets_self_loop():
    assert build_transition(sp.csr_matrix((1, 1))).toarray().tolist() == [[1.0]]


def test_directed_edge_without_out_edges_keeps_mass():
    g = Graph.from_edges(2, [(0, 1)], directed=True)
    assert build_transition(g.adjacency).toarray().tolist() == [[0, 1], [0, 1]]


def test_transition_rejects_bad_input():
    with pytest.raises(ValueError):
        build_transition(np.array([[0, -1], [1, 0]]))
    with pytest.raises(ValueError):
        build_transition(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.just(12)),
              elements=st.floats(0, 5, allow_nan=False)))
def test_rows_stochastic(M):
    n = M.shape[0]
    A = M[:, :n] * (M[:, :n] > 2.5)
    T = build_transition(A)
    np.testing.assert_allclose(np.asarray(T.sum(axis=1)).ravel(), 1.0, atol=1e-12)
    assert T.data.min() >= 0
    np.testing.assert_allclose(T.toarray(), dense_normalize(A), atol=1e-15)


def test_absorbing_rows():
    T = build_transition(path_graph().adjacency)
    That = absorbing_transition(T, [0]).toarray()
    assert That[0].tolist() == [1, 0, 0]
    np.testing.assert_array_equal(That[1:], T.toarray()[1:])
    np.testing.assert_array_equal(absorbing_transition(T, []).toarray(), T.toarray())
    np.testing.assert_array_equal(absorbing_transition(T, [0, 1, 2]).toarray(), np.eye(3))
    with pytest.raises(ValueError):
        absorbing_transition(T, [3])


def test_absorbing_idempotent(rng):
    A = (rng.random((10, 10)) < 0.4).astype(float)
    T = build_transition(A)
    S = rng.random(10) < 0.5
    once = absorbing_transition(T, S)
    twice = absorbing_transition(once, S)
    np.testing.assert_array_equal(once.toarray(), twice.toarray())


def test_init_label_distributions():
    db = GraphDatabase([Graph.from_edges(3, [], [0, 1, -1])], 2)
    np.testing.assert_array_equal(init_label_distributions(db), [[1, 0], [0, 1], [0.5, 0.5]])
    db3 = GraphDatabase([Graph.from_edges(2, [], [0, 0])], 3)
    np.testing.assert_array_equal(init_label_distributions(db3), [[1, 0, 0]] * 2)
    one = GraphDatabase([Graph.from_edges(1, [], [-1])], 2)
    np.testing.assert_array_equal(init_label_distributions(one, [0.9, 0.1]), [[0.9, 0.1]])
    with pytest.raises(ValueError):
        init_label_distributions(one, [0.5, 0.6])


def test_degree_labels_examples():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    db = degree_labels(GraphDatabase([tri]))
    assert db.num_labels == 1 and db.node_labels.tolist() == [0, 0, 0]

    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    db = degree_labels(GraphDatabase([star]))
    assert db.num_labels == 2 and db.node_labels.tolist() == [1, 0, 0, 0]

    g1 = Graph.from_edges(3, [(0, 1), (1, 2)])                          # degrees 1,2,1
    g2 = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)])  # degrees 4,2,2,1,1
    db = degree_labels(GraphDatabase([g1, g2]))
    assert db.num_labels == 3
    assert db.node_labels.tolist() == [0, 1, 0, 2, 1, 1, 0, 0]


def test_degree_map_depends_only_on_degree_set():
    g1 = Graph.from_edges(3, [(0, 1), (1, 2)])
    g2 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    a = degree_labels(GraphDatabase([g1, g2]))
    b = degree_labels(GraphDatabase([g2, g1]))
    assert a.num_labels == b.num_labels
    assert a[0].node_labels.tolist() == b[1].node_labels.tolist()
    assert a[1].node_labels.tolist() == b[0].node_labels.tolist()


def test_stack_layout():
    g = Graph.from_edges(2, [(0, 1)], [0, 1])
    T, ind = stack_database(GraphDatabase([g, g]))
    assert T.shape == (4, 4) and ind.tolist() == [0, 0, 1, 1]
    dense = T.toarray()
    assert np.all(dense[:2, 2:] == 0) and np.all(dense[2:, :2] == 0)
    T1, ind1 = stack_database(GraphDatabase([g]))
    np.testing.assert_array_equal(T1.toarray(), build_transition(g.adjacency).toarray())
    assert ind1.tolist() == [0, 0]


def test_stacked_step_equals_per_graph_steps(rng):
    from propkern.synthetic import random_database
    db = random_database(rng, n_graphs=6, k=3, weighted=True)
    T, _ = stack_database(db)
    P = init_label_distributions(db)
    stacked = diffusion_step(T, P)
    offs = np.concatenate([[0], np.cumsum(db.node_counts)])
    parts = [diffusion_step(build_transition(g.adjacency), P[offs[i]:offs[i + 1]])
             for i, g in enumerate(db.graphs)]
    assert np.array_equal(stacked, np.vstack(parts))


def test_database_validation():
    g = Graph.from_edges(2, [(0, 1)], [0, 3])
    with pytest.raises(ValueError):
        GraphDatabase([g], 2)
    with pytest.raises(ValueError):
        GraphDatabase([Graph.from_edges(1, [], [0], attributes=[[1.0, 2.0]]),
                       Graph.from_edges(1, [], [0], attributes=[[1.0]])])
    db = GraphDatabase([g, path_graph([0, 1, 2])])
    assert db.num_labels == 4 and db.total_nodes == 5
