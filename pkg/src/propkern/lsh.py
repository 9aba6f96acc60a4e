"""Locality-sensitive hashing of distributions and attribute vectors.

One random projection per hash.  Total variation and L1 use Cauchy
projections (1-stable), Hellinger and L2 use Gaussian projections
(2-stable); Hellinger additionally maps rows through an entrywise square
root first, which turns it into a scaled L2 distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METRICS = ("tv", "h", "l1", "l2")
_GAUSSIAN = ("h", "l2")


def _metric(metric: str) -> str:
    m = metric.lower()
    if m not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    return m


@dataclass(frozen=True, eq=False)
class HashFunction:
    width: float
    projection: np.ndarray
    offset: float
    metric: str

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"bin width must be positive, got {self.width}")
        if not 0 <= self.offset < self.width:
            raise ValueError("offset must lie in [0, width)")
        v = np.asarray(self.projection, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise ValueError("projection vector must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "projection", v)
        object.__setattr__(self, "metric", _metric(self.metric))

    @property
    def dim(self) -> int:
        return self.projection.shape[0]

    def raw(self, X) -> np.ndarray:
        """Integer-valued (float64) bin of every row of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1) if self.dim == 1 else X.reshape(1, -1)
        if X.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} columns, got {X.shape[1]}")
        if self.metric == "h":
            if X.size and X.min() < 0:
                raise ValueError("Hellinger hashing needs nonnegative entries")
            X = np.sqrt(X)
        return np.floor((X @ self.projection + self.offset) / self.width)


@dataclass(frozen=True, eq=False)
class BinAssignment:
    raw_bins: np.ndarray
    compact_bins: np.ndarray
    bin_count: int

    def __len__(self):
        return self.compact_bins.shape[0]


def draw_hash(dim: int, w: float, metric: str, rng: np.random.Generator) -> HashFunction:
    """Draw one hash function for ``dim``-dimensional inputs."""
    if dim < 1:
        raise ValueError("hash dimension must be >= 1")
    if not w > 0:
        raise ValueError(f"bin width must be positive, got {w}")
    metric = _metric(metric)
    if metric in _GAUSSIAN:
        v = rng.standard_normal(dim)
    else:
        v = rng.standard_normal(dim) / rng.standard_normal(dim)
    b = w * rng.random()
    return HashFunction(float(w), v, float(b), metric)


def compact(keys) -> BinAssignment:
    """Relabel rows of ``keys`` with contiguous ids in order of first occurrence.

    ``keys`` is a vector or an ``N x m`` matrix; rows are compared as tuples.
    """
    keys = np.asarray(keys)
    n = keys.shape[0]
    if n == 0:
        return BinAssignment(keys, np.zeros(0, dtype=np.int64), 0)
    if keys.ndim == 1:
        _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    else:
        _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return BinAssignment(keys, rank[inverse], int(first.size))


def apply_hash(H: HashFunction, X) -> BinAssignment:
    return compact(H.raw(X))


def hash_columns(hashes, X) -> BinAssignment:
    """Hash column ``j`` of ``X`` with scalar hash ``hashes[j]``; bins are joint tuples."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(hashes):
        raise ValueError("need exactly one scalar hash per column")
    raw = np.column_stack([H.raw(X[:, [j]]) for j, H in enumerate(hashes)])
    return compact(raw)


def combine_bins(*assignments: BinAssignment) -> BinAssignment:
    """Joint bins: two nodes share a bin iff they share every component bin."""
    lengths = {len(a) for a in assignments}
    if len(lengths) != 1:
        raise ValueError(f"bin assignments differ in length: {sorted(lengths)}")
    return compact(np.column_stack([a.compact_bins for a in assignments]))


def tv_distance(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def hellinger_distance(p, q) -> float:
    """Computed from the Bhattacharyya coefficient, independently of the square-root map."""
    bc = float(np.sum(np.sqrt(np.asarray(p) * np.asarray(q))))
    return float(np.sqrt(max(0.0, 1.0 - bc)))
