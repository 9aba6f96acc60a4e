"""Continuous node attributes: direct per-dimension hashing and P2K.

P2K models every node's attribute distribution as a Gaussian mixture with
one component per node (shared covariance).  Mixture weights start as the
identity and are propagated with the transition matrix; instead of carrying
the ``N x N`` weight matrix we propagate the densities evaluated at a fixed
set of sample points, ``Q_{t+1} = T Q_t``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from .graph import GraphDatabase, init_label_distributions, stack_database
from .kernel import KernelMatrix, PKConfig, accumulate, count_features
from .lsh import BinAssignment, HashFunction, apply_hash, combine_bins, draw_hash, hash_columns
from .propagation import SchemeConfig, diffusion_step

DEFAULT_RIDGE = 1e-6


@dataclass(frozen=True)
class P2KConfig(PKConfig):
    w_attr: float = 1.0
    metric_attr: str = "l1"
    samples: int = 100
    per_dimension_hash: bool = True

    def __post_init__(self):
        super().__post_init__()
        if not self.w_attr > 0:
            raise ValueError(f"w_attr must be positive, got {self.w_attr}")
        if self.metric_attr.lower() not in ("l1", "l2"):
            raise ValueError(f"attribute metric must be 'l1' or 'l2', got {self.metric_attr!r}")
        object.__setattr__(self, "metric_attr", self.metric_attr.lower())
        if self.samples < 1:
            raise ValueError("need at least one sample point")


@dataclass(frozen=True, eq=False)
class AttributeModel:
    X: np.ndarray
    covariance: np.ndarray
    sample_points: np.ndarray
    mean: Optional[np.ndarray] = None
    std: Optional[np.ndarray] = None


def standardize_attributes(X) -> Tuple[np.ndarray, dict]:
    """Zero-mean, unit-std columns; constant columns are only centered."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[1] < 1:
        raise ValueError("attributes need at least one dimension")
    if not np.all(np.isfinite(X)):
        raise ValueError("attributes contain non-finite values")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    return (X - mean) / scale, {"mean": mean, "std": scale}


def hash_attributes_per_dim(X, w_attr: float, rng: np.random.Generator, metric: str = "l1") -> BinAssignment:
    """One scalar hash per attribute dimension, joined into a tuple bin."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    hashes = [draw_hash(1, w_attr, metric, rng) for _ in range(X.shape[1])]
    return hash_columns(hashes, X)


def fit_mixture(X, ridge: float = DEFAULT_RIDGE, samples: int = 100,
                rng: Optional[np.random.Generator] = None) -> AttributeModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    N, D = X.shape
    if N < 2:
        raise ValueError("need at least two attribute vectors to estimate a covariance")
    cov = np.atleast_2d(np.cov(X, rowvar=False, ddof=1))
    tr = np.trace(cov)
    # relative ridge; falls back to an absolute one for all-constant data
    cov = cov + ridge * (tr / D if tr > 0 else 1.0) * np.eye(D)
    rng = np.random.default_rng() if rng is None else rng
    idx = rng.choice(N, size=samples, replace=samples > N)
    return AttributeModel(X, cov, X[idx].copy())


def gaussian_logpdf(X, Y, cov) -> np.ndarray:
    """``out[u, s]`` = log density of ``N(X[u], cov)`` at ``Y[s]``."""
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as e:
        raise ValueError("covariance is not positive definite") from e
    D = cov.shape[0]
    Zx = solve_triangular(L, X.T, lower=True)
    Zy = solve_triangular(L, Y.T, lower=True)
    sq = (Zx * Zx).sum(0)[:, None] + (Zy * Zy).sum(0)[None, :] - 2.0 * Zx.T @ Zy
    np.maximum(sq, 0.0, out=sq)
    log_norm = np.log(np.diag(L)).sum() + 0.5 * D * np.log(2 * np.pi)
    return -0.5 * sq - log_norm


def init_pdf_matrix(model: AttributeModel) -> np.ndarray:
    return np.exp(gaussian_logpdf(model.X, model.sample_points, model.covariance))


def attribute_step(T, Q) -> np.ndarray:
    return diffusion_step(T, Q)


def column_scale(Q0) -> np.ndarray:
    std = np.asarray(Q0).std(axis=0)
    return np.where(std > 0, std, 1.0)


@dataclass(frozen=True, eq=False)
class P2KDraws:
    label: List[Optional[HashFunction]]
    attr: List[List[HashFunction]]


def p2k_hashes(config: P2KConfig, k: int, samples: int) -> P2KDraws:
    """Per-iteration draws: the label hash (if labels exist), then the attribute hashes.

    Label and attribute hashes are independent draws from one stream.
    """
    rng = np.random.default_rng(config.seed)
    label, attr = [], []
    for _ in range(config.t_max + 1):
        label.append(draw_hash(k, config.w_label, config.metric_label, rng) if k > 0 else None)
        if config.per_dimension_hash:
            attr.append([draw_hash(1, config.w_attr, config.metric_attr, rng) for _ in range(samples)])
        else:
            attr.append([draw_hash(samples, config.w_attr, config.metric_attr, rng)])
    return P2KDraws(label, attr)


def prepare_p2k(db: GraphDatabase, config: P2KConfig):
    """Standardized attributes, fitted mixture, initial PDF matrix and its column scale."""
    if db.attr_dim == 0:
        raise ValueError("P2K needs node attributes")
    X, stats = standardize_attributes(db.attributes)
    model = fit_mixture(X, samples=config.samples, rng=np.random.default_rng([config.seed, 1]))
    model = AttributeModel(model.X, model.covariance, model.sample_points, stats["mean"], stats["std"])
    Q0 = init_pdf_matrix(model)
    return model, Q0, column_scale(Q0)


def hash_pdf_matrix(hashes: List[HashFunction], Q, scale) -> BinAssignment:
    Qs = np.asarray(Q) / scale
    if len(hashes) == 1:
        return apply_hash(hashes[0], Qs)
    return hash_columns(hashes, Qs)


def iter_p2k_features(db: GraphDatabase, config: P2KConfig,
                      draws: Optional[P2KDraws] = None) -> Iterator:
    T, indicator = stack_database(db)
    model, Q, scale = prepare_p2k(db, config)
    k = db.num_labels
    if draws is None:
        draws = p2k_hashes(config, k, Q.shape[1])
    if k > 0:
        P0 = init_label_distributions(db)
        scheme = SchemeConfig(config.scheme, db.observed)
        P = P0
    for t in range(config.t_max + 1):
        bins = hash_pdf_matrix(draws.attr[t], Q, scale)
        if k > 0:
            bins = combine_bins(apply_hash(draws.label[t], P), bins)
        yield count_features(bins, indicator, len(db), t)
        if t < config.t_max:
            if k > 0:
                P = scheme.step(T, P, P0)
            Q = attribute_step(T, Q)


def p2k(db: GraphDatabase, config: P2KConfig, *, keep_contributions: bool = False) -> KernelMatrix:
    """Propagation kernel over labels and Gaussian-mixture attribute distributions."""
    return accumulate(iter_p2k_features(db, config), len(db), asdict(config),
                      config.normalize, keep_contributions)


def iter_simple_attribute_features(db: GraphDatabase, config: P2KConfig) -> Iterator:
    """Labels are propagated; raw standardized attributes are hashed per dimension, unpropagated."""
    if db.attr_dim == 0:
        raise ValueError("attribute kernel needs node attributes")
    T, indicator = stack_database(db)
    X, _ = standardize_attributes(db.attributes)
    k = db.num_labels
    rng = np.random.default_rng(config.seed)
    if k > 0:
        P0 = init_label_distributions(db)
        scheme = SchemeConfig(config.scheme, db.observed)
        P = P0
    for t in range(config.t_max + 1):
        label_hash = draw_hash(k, config.w_label, config.metric_label, rng) if k > 0 else None
        bins = hash_attributes_per_dim(X, config.w_attr, rng, config.metric_attr)
        if k > 0:
            bins = combine_bins(apply_hash(label_hash, P), bins)
        yield count_features(bins, indicator, len(db), t)
        if t < config.t_max and k > 0:
            P = scheme.step(T, P, P0)


def attribute_kernel(db: GraphDatabase, config: P2KConfig) -> KernelMatrix:
    return accumulate(iter_simple_attribute_features(db, config), len(db), asdict(config),
                      config.normalize)

