"""Propagation kernel computation for labeled and partially labeled graphs."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator, List, Optional

import numpy as np
import scipy.sparse as sp

from .graph import GraphDatabase, build_transition, init_label_distributions, stack_database
from .lsh import BinAssignment, HashFunction, apply_hash, draw_hash
from .propagation import SchemeConfig, push_back

DEFAULT_LABEL_WIDTH = 1e-5


@dataclass(frozen=True)
class PKConfig:
    t_max: int = 3
    w_label: float = DEFAULT_LABEL_WIDTH
    metric_label: str = "tv"
    scheme: str = "diffusion"
    normalize: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.t_max < 0:
            raise ValueError(f"t_max must be >= 0, got {self.t_max}")
        if not self.w_label > 0:
            raise ValueError(f"w_label must be positive, got {self.w_label}")
        if self.metric_label.lower() not in ("tv", "h"):
            raise ValueError(f"label metric must be 'tv' or 'h', got {self.metric_label!r}")
        object.__setattr__(self, "metric_label", self.metric_label.lower())
        name = SchemeConfig(self.scheme, np.zeros(0, dtype=bool)).scheme
        object.__setattr__(self, "scheme", name)


@dataclass(frozen=True, eq=False)
class FeatureCounts:
    """Sparse ``n_graphs x bins`` count matrix for one iteration."""

    counts: sp.csr_matrix
    t: int = 0

    def dense(self) -> np.ndarray:
        return self.counts.toarray()


@dataclass(eq=False)
class KernelMatrix:
    values: np.ndarray
    config: dict = field(default_factory=dict)
    contributions: Optional[List[np.ndarray]] = None

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def shape(self):
        return self.values.shape

    def __getitem__(self, idx):
        return self.values[idx]


def linear_base_kernel(counts: sp.csr_matrix) -> np.ndarray:
    return np.asarray((counts @ counts.T).toarray(), dtype=np.float64)


def count_features(bins: BinAssignment, indicator, n_graphs: Optional[int] = None, t: int = 0) -> FeatureCounts:
    """Entry ``(i, b)`` counts the nodes of graph ``i`` that fall into bin ``b``."""
    indicator = np.asarray(indicator, dtype=np.int64)
    if indicator.shape[0] != len(bins):
        raise ValueError("bin assignment and graph indicator differ in length")
    if n_graphs is None:
        n_graphs = int(indicator.max()) + 1 if indicator.size else 0
    data = np.ones(indicator.size, dtype=np.float64)
    counts = sp.csr_matrix((data, (indicator, bins.compact_bins)), shape=(n_graphs, bins.bin_count))
    counts.sum_duplicates()
    return FeatureCounts(counts, t)


def contribution(features: FeatureCounts, base_kernel: Callable = linear_base_kernel) -> np.ndarray:
    return base_kernel(features.counts)


def normalize_kernel(K) -> np.ndarray:
    """Cosine-normalize a Gram matrix to unit diagonal."""
    K = np.asarray(K, dtype=np.float64)
    d = np.diag(K).copy()
    bad = np.flatnonzero(d <= 0)
    if bad.size:
        raise ValueError(f"cannot normalize: graph {int(bad[0])} has kernel self-similarity {d[bad[0]]}")
    # sqrt of the product, not product of sqrts: equal diagonals then give exactly 1
    out = K / np.sqrt(np.outer(d, d))
    np.fill_diagonal(out, 1.0)
    return out


def label_hashes(config: PKConfig, k: int) -> List[HashFunction]:
    """The per-iteration hash draws a kernel run with ``config`` uses."""
    rng = np.random.default_rng(config.seed)
    return [draw_hash(k, config.w_label, config.metric_label, rng) for _ in range(config.t_max + 1)]


def _prepare(db: GraphDatabase, config: PKConfig):
    if db.num_labels < 1:
        raise ValueError("database has no node labels (k=0); apply degree_labels first")
    T, indicator = stack_database(db)
    P0 = init_label_distributions(db)
    scheme = SchemeConfig(config.scheme, db.observed)
    return T, indicator, P0, scheme


def iter_label_features(db: GraphDatabase, config: PKConfig,
                        hashes: Optional[List[HashFunction]] = None) -> Iterator[FeatureCounts]:
    """Yield the count features of iterations ``0..t_max``."""
    T, indicator, P0, scheme = _prepare(db, config)
    if hashes is None:
        hashes = label_hashes(config, db.num_labels)
    P = P0
    for t in range(config.t_max + 1):
        bins = apply_hash(hashes[t], P)
        yield count_features(bins, indicator, len(db), t)
        if t < config.t_max:
            P = scheme.step(T, P, P0)


def accumulate(features: Iterator[FeatureCounts], n: int, config: dict, normalize: bool,
               keep_contributions: bool = False,
               base_kernel: Callable = linear_base_kernel) -> KernelMatrix:
    K = np.zeros((n, n))
    parts = [] if keep_contributions else None
    for phi in features:
        Kt = contribution(phi, base_kernel)
        K += Kt
        if parts is not None:
            parts.append(Kt)
    if normalize:
        K = normalize_kernel(K)
    return KernelMatrix(K, config, parts)


def propagation_kernel(db: GraphDatabase, config: PKConfig, *, keep_contributions: bool = False,
                       base_kernel: Callable = linear_base_kernel) -> KernelMatrix:
    """Propagation kernel over ``t_max + 1`` iterations (``t = 0`` included)."""
    features = iter_label_features(db, config)
    return accumulate(features, len(db), asdict(config), config.normalize,
                      keep_contributions, base_kernel)


def kernel_bruteforce(db: GraphDatabase, config: PKConfig, hashes: List[HashFunction]) -> np.ndarray:
    """Reference kernel: explicit node-pair double sum of Dirac hash comparisons.

    Propagates every graph separately with dense matrices and never bins or
    counts; meant as a test oracle for :func:`propagation_kernel`.
    """
    if len(hashes) < config.t_max + 1:
        raise ValueError("need one hash function per iteration")
    P0_all = init_label_distributions(db)
    offsets = np.concatenate([[0], np.cumsum(db.node_counts)])
    states = []
    for i, g in enumerate(db.graphs):
        T = build_transition(g.adjacency).toarray()
        P0 = P0_all[offsets[i]:offsets[i + 1]]
        mask = g.observed
        P = P0.copy()
        per_t = []
        for t in range(config.t_max + 1):
            per_t.append(hashes[t].raw(P))
            if config.scheme == "diffusion":
                P = T @ P
            else:
                P = T @ push_back(P, P0, mask)
        states.append(per_t)

    n = len(db)
    K = np.zeros((n, n))
    for t in range(config.t_max + 1):
        for i in range(n):
            for j in range(i, n):
                hi, hj = states[i][t], states[j][t]
                v = float(np.sum(hi[:, None] == hj[None, :]))
                K[i, j] += v
                if i != j:
                    K[j, i] += v
    return normalize_kernel(K) if config.normalize else K
