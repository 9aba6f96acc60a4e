"""Graph and database containers, transition matrices, label initialization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

UNLABELED = -1


def _as_csr(adjacency) -> sp.csr_matrix:
    A = sp.csr_matrix(adjacency, dtype=np.float64)
    A.sum_duplicates()
    A.sort_indices()
    return A


@dataclass(frozen=True, eq=False)
class Graph:
    """A single (possibly directed, weighted, partially labeled) graph.

    ``node_labels`` uses ``-1`` for unlabeled nodes.  ``node_attributes`` is an
    ``n x D`` array or ``None``.
    """

    adjacency: sp.csr_matrix
    node_labels: np.ndarray
    node_attributes: Optional[np.ndarray] = None
    graph_class: Optional[int] = None

    def __post_init__(self):
        A = _as_csr(self.adjacency)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {A.shape}")
        if A.nnz and A.data.min() < 0:
            raise ValueError("adjacency has negative weights")
        n = A.shape[0]
        labels = np.asarray(self.node_labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != n:
            raise ValueError(f"expected {n} node labels, got {labels.shape[0]}")
        if labels.size and labels.min() < UNLABELED:
            raise ValueError("node labels must be >= 0, or -1 for unlabeled")
        attrs = self.node_attributes
        if attrs is not None:
            attrs = np.asarray(attrs, dtype=np.float64)
            if attrs.ndim == 1:
                attrs = attrs.reshape(-1, 1)
            if attrs.shape[0] != n:
                raise ValueError(f"expected {n} attribute rows, got {attrs.shape[0]}")
            attrs.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        object.__setattr__(self, "node_labels", labels)
        object.__setattr__(self, "node_attributes", attrs)

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def observed(self) -> np.ndarray:
        return self.node_labels != UNLABELED

    @classmethod
    def from_edges(cls, n, edges, labels=None, *, directed=False, weights=None,
                   attributes=None, graph_class=None) -> "Graph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=np.float64)
        A = sp.coo_matrix((w, (edges[:, 0], edges[:, 1])), shape=(n, n)).tocsr()
        if not directed:
            A = A.maximum(A.T)
        if labels is None:
            labels = np.full(n, UNLABELED)
        return cls(A, labels, attributes, graph_class)


@dataclass(frozen=True, eq=False)
class GraphDatabase:
    """Ordered collection of graphs sharing one label alphabet and attribute dimension.

    ``num_labels`` defaults to the largest observed label plus one.
    """

    graphs: tuple
    num_labels: int = -1
    attr_dim: int = field(default=-1)

    def __post_init__(self):
        graphs = tuple(self.graphs)
        object.__setattr__(self, "graphs", graphs)
        observed_max = max((int(g.node_labels.max()) for g in graphs if g.node_count), default=-1)
        k = self.num_labels
        if k < 0:
            k = observed_max + 1
        elif observed_max >= k:
            raise ValueError(f"label {observed_max} outside alphabet of size {k}")
        object.__setattr__(self, "num_labels", k)

        dims = {g.node_attributes.shape[1] for g in graphs if g.node_attributes is not None}
        has_attrs = [g.node_attributes is not None for g in graphs]
        if any(has_attrs) and not all(has_attrs):
            raise ValueError("either all graphs carry attributes or none do")
        if len(dims) > 1:
            raise ValueError(f"graphs disagree on attribute dimension: {sorted(dims)}")
        D = dims.pop() if dims else 0
        if self.attr_dim >= 0 and self.attr_dim != D:
            raise ValueError(f"declared attr_dim={self.attr_dim} but graphs have D={D}")
        object.__setattr__(self, "attr_dim", D)

    def __len__(self) -> int:
        return len(self.graphs)

    def __getitem__(self, i) -> Graph:
        return self.graphs[i]

    def __iter__(self):
        return iter(self.graphs)

    @property
    def node_counts(self) -> np.ndarray:
        return np.array([g.node_count for g in self.graphs], dtype=np.int64)

    @property
    def total_nodes(self) -> int:
        return int(self.node_counts.sum())

    @property
    def node_labels(self) -> np.ndarray:
        if not self.graphs:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([g.node_labels for g in self.graphs])

    @property
    def observed(self) -> np.ndarray:
        return self.node_labels != UNLABELED

    @property
    def attributes(self) -> Optional[np.ndarray]:
        if self.attr_dim == 0:
            return None
        return np.vstack([g.node_attributes for g in self.graphs])

    @property
    def graph_classes(self) -> Optional[np.ndarray]:
        classes = [g.graph_class for g in self.graphs]
        if any(c is None for c in classes):
            return None
        return np.array(classes, dtype=np.int64)

    @property
    def graph_indicator(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.graphs)), self.node_counts)

    def with_labels(self, labels, num_labels=None) -> "GraphDatabase":
        """Return a copy whose stacked node labels are replaced by ``labels``."""
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (self.total_nodes,):
            raise ValueError("label vector length must equal total node count")
        parts = np.split(labels, np.cumsum(self.node_counts)[:-1])
        graphs = [Graph(g.adjacency, part, g.node_attributes, g.graph_class)
                  for g, part in zip(self.graphs, parts)]
        k = self.num_labels if num_labels is None else num_labels
        return GraphDatabase(graphs, k)


def build_transition(adjacency) -> sp.csr_matrix:
    """Row-normalize a nonnegative adjacency matrix.

    Rows without outgoing weight become self-loops so that every row stays
    stochastic.  Directed graphs are normalized as given.
    """
    A = _as_csr(adjacency)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    if A.nnz and A.data.min() < 0:
        raise ValueError("adjacency has negative weights")
    A.eliminate_zeros()
    deg = np.asarray(A.sum(axis=1)).ravel()
    isolated = np.flatnonzero(deg == 0)
    if isolated.size:
        loops = sp.csr_matrix((np.ones(isolated.size), (isolated, isolated)), shape=A.shape)
        A = (A + loops).tocsr()
        A.sort_indices()
        deg[isolated] = 1.0
    counts = np.diff(A.indptr)
    A.data = A.data / np.repeat(deg, counts)
    return A


def absorbing_transition(T, absorbing) -> sp.csr_matrix:
    """Replace the rows of ``absorbing`` nodes by identity rows.

    ``absorbing`` may be an index array or a boolean mask.  Rows outside the
    set keep their stored entries in their original order.
    """
    T = sp.csr_matrix(T)
    n = T.shape[0]
    S = np.asarray(absorbing)
    if S.dtype == bool:
        if S.shape != (n,):
            raise ValueError("absorbing mask length must equal node count")
        mask = S
    else:
        S = S.astype(np.int64).reshape(-1)
        if S.size and (S.min() < 0 or S.max() >= n):
            raise ValueError(f"absorbing node index out of range for {n} nodes")
        mask = np.zeros(n, dtype=bool)
        mask[S] = True

    indptr = [0]
    indices = []
    data = []
    for i in range(n):
        if mask[i]:
            indices.append(np.array([i]))
            data.append(np.array([1.0]))
        else:
            lo, hi = T.indptr[i], T.indptr[i + 1]
            indices.append(T.indices[lo:hi])
            data.append(T.data[lo:hi])
        indptr.append(indptr[-1] + len(indices[-1]))
    indices = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    data = np.concatenate(data) if data else np.zeros(0)
    return sp.csr_matrix((data, indices, np.array(indptr)), shape=T.shape)


def init_label_distributions(db: GraphDatabase, prior=None) -> np.ndarray:
    """Initial ``N x k`` label distributions.

    Labeled nodes get a Kronecker row; unlabeled nodes get ``prior``
    (uniform by default).
    """
    k = db.num_labels
    if k < 1:
        raise ValueError("database has no label alphabet (k=0)")
    if prior is None:
        prior = np.full(k, 1.0 / k)
    else:
        prior = np.asarray(prior, dtype=np.float64)
        if prior.shape != (k,):
            raise ValueError(f"prior must have length {k}")
        if prior.min() < 0 or abs(prior.sum() - 1.0) > 1e-9:
            raise ValueError("prior must be a probability vector summing to 1")
    labels = db.node_labels
    P = np.tile(prior, (labels.size, 1))
    seen = np.flatnonzero(labels != UNLABELED)
    P[seen] = 0.0
    P[seen, labels[seen]] = 1.0
    return P


def degree_labels(db: GraphDatabase) -> GraphDatabase:
    """Label every node by its weighted out-degree.

    Distinct degrees across the whole database are sorted and mapped to
    ``0..k-1``.  Degrees are rounded to 12 significant digits first.
    """
    degs = [np.asarray(g.adjacency.sum(axis=1)).ravel() for g in db.graphs]
    flat = np.concatenate(degs) if degs else np.zeros(0)
    rounded = np.array([float(f"{d:.12g}") for d in flat])
    values, labels = np.unique(rounded, return_inverse=True)
    return db.with_labels(labels.reshape(-1), num_labels=len(values))


def _stack_csr(blocks) -> sp.csr_matrix:
    """Block-diagonal CSR by concatenating index arrays (avoids per-block COO round trips)."""
    sizes = np.array([b.shape[0] for b in blocks], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    nnz = np.array([b.nnz for b in blocks], dtype=np.int64)
    nnz_off = np.concatenate([[0], np.cumsum(nnz)])
    data = np.concatenate([b.data for b in blocks]).astype(np.float64)
    indices = np.concatenate([b.indices.astype(np.int64) + o for b, o in zip(blocks, offsets)])
    indptr = np.concatenate([b.indptr[:-1].astype(np.int64) + o for b, o in zip(blocks, nnz_off)] + [[nnz_off[-1]]])
    n = int(offsets[-1])
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def stack_database(db: GraphDatabase):
    """Block-diagonal ``N x N`` transition matrix and the node-to-graph indicator."""
    if len(db) == 0:
        raise ValueError("cannot stack an empty database")
    # normalization is row-local, so normalizing the stacked adjacency once is equivalent
    T = build_transition(_stack_csr([g.adjacency for g in db.graphs]))
    T.sort_indices()
    return T, db.graph_indicator
