"""Propagation kernels on pixel grids via discrete convolution.

Each grid keeps its label distributions as an ``m1 x m2 x k`` tensor; one
propagation step convolves every label plane with a small filter.  No edge
list is ever built.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .graph import Graph
from .kernel import KernelMatrix, PKConfig, accumulate, count_features, label_hashes
from .lsh import apply_hash

PADDINGS = ("renormalized_zero", "circular")
_PADDING_ALIASES = {"renorm": "renormalized_zero", "zero": "renormalized_zero", "wrap": "circular"}

_FILTERS = {
    "n1_4": [[0, 0.25, 0],
             [0.25, 0, 0.25],
             [0, 0.25, 0]],
    "n1_8": [[0.06, 0.17, 0.06],
             [0.17, 0.05, 0.17],
             [0.06, 0.17, 0.06]],
    "n2_16": [[0.01, 0.06, 0.09, 0.06, 0.01],
              [0.06, 0.04, 0, 0.04, 0.06],
              [0.09, 0, 0, 0, 0.09],
              [0.06, 0.04, 0, 0.04, 0.06],
              [0.01, 0.06, 0.09, 0.06, 0.01]],
}


@dataclass(frozen=True, eq=False)
class FilterMatrix:
    weights: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        B = np.asarray(self.weights, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("filter must be a square matrix")
        if B.shape[0] % 2 == 0:
            raise ValueError(f"filter size must be odd, got {B.shape[0]}")
        if B.min() < 0:
            raise ValueError("filter weights must be nonnegative")
        B.setflags(write=False)
        object.__setattr__(self, "weights", B)

    @property
    def radius(self) -> int:
        return self.weights.shape[0] // 2


def filter_matrix(name: str) -> FilterMatrix:
    """Circular-symmetric neighborhood filters ``n1_4``, ``n1_8`` and ``n2_16``."""
    key = name.lower()
    if key not in _FILTERS:
        raise ValueError(f"unknown filter {name!r}; expected one of {sorted(_FILTERS)}")
    return FilterMatrix(np.array(_FILTERS[key]), key)


@dataclass(frozen=True, eq=False)
class GridGraph:
    label_grid: np.ndarray
    num_labels: int = -1
    graph_class: Optional[int] = None

    def __post_init__(self):
        L = np.asarray(self.label_grid, dtype=np.int64)
        if L.ndim != 2 or min(L.shape) < 1:
            raise ValueError("label grid must be a nonempty 2-d array")
        if L.min() < 0:
            raise ValueError("grid labels must be nonnegative")
        k = self.num_labels if self.num_labels >= 0 else int(L.max()) + 1
        if L.max() >= k:
            raise ValueError(f"label {L.max()} outside alphabet of size {k}")
        L.setflags(write=False)
        object.__setattr__(self, "label_grid", L)
        object.__setattr__(self, "num_labels", k)

    @property
    def shape(self):
        return self.label_grid.shape

    def initial_distribution(self) -> np.ndarray:
        P = np.zeros(self.shape + (self.num_labels,))
        r, c = np.indices(self.shape)
        P[r, c, self.label_grid] = 1.0
        return P


def _padding(padding: str) -> str:
    p = _PADDING_ALIASES.get(padding, padding)
    if p not in PADDINGS:
        raise ValueError(f"unknown padding {padding!r}")
    return p


def _convolve_plane(plane, B, mode):
    return ndimage.convolve(plane, B, mode=mode, cval=0.0)


def convolve_step(P, B, padding: str = "renormalized_zero") -> np.ndarray:
    """Convolve each label plane of ``P`` with ``B`` and renormalize each fiber.

    Renormalization divides by the filter mass that landed on in-grid pixels,
    so fibers stay stochastic at the borders.  Pixels that receive no mass at
    all (e.g. a 1x1 grid with a zero-center filter) keep their distribution.
    """
    if not isinstance(B, FilterMatrix):
        B = FilterMatrix(B)
    W = B.weights
    mode = "constant" if _padding(padding) == "renormalized_zero" else "wrap"
    P = np.asarray(P, dtype=np.float64)
    out = np.empty_like(P)
    for j in range(P.shape[2]):
        out[:, :, j] = _convolve_plane(P[:, :, j], W, mode)
    mass = _convolve_plane(np.ones(P.shape[:2]), W, mode)
    dead = mass <= 0
    mass[dead] = 1.0
    out /= mass[:, :, None]
    out[dead] = P[dead]
    return out


def quantize_grayscale(image, levels: int) -> np.ndarray:
    """Uniform quantization of 8-bit gray values into ``levels`` labels."""
    if levels < 1:
        raise ValueError("need at least one quantization level")
    if levels > 256:
        raise ValueError("at most 256 levels for 8-bit images")
    img = np.asarray(image, dtype=np.int64)
    if img.size and (img.min() < 0 or img.max() > 255):
        raise ValueError("gray values must lie in 0..255")
    return img * levels // 256


def grid_to_graph(grid: GridGraph, B) -> Graph:
    """Explicit neighborhood graph whose row-normalized transition matches
    ``convolve_step`` with renormalized zero padding."""
    if not isinstance(B, FilterMatrix):
        B = FilterMatrix(B)
    m1, m2 = grid.shape
    r = B.radius
    idx = np.arange(m1 * m2).reshape(m1, m2)
    rows, cols, vals = [], [], []
    for a in range(-r, r + 1):
        for b in range(-r, r + 1):
            wgt = B.weights[a + r, b + r]
            if wgt == 0:
                continue
            # convolution: out[x] += B[o] * P[x - o]
            src = idx[max(0, a):m1 + min(0, a), max(0, b):m2 + min(0, b)]
            dst = idx[max(0, -a):m1 + min(0, -a), max(0, -b):m2 + min(0, -b)]
            rows.append(src.ravel())
            cols.append(dst.ravel())
            vals.append(np.full(src.size, wgt))
    n = m1 * m2
    if rows:
        A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    else:
        A = sp.csr_matrix((n, n))
    return Graph(A, grid.label_grid.ravel(), graph_class=grid.graph_class)


def _check_grids(grids: Sequence[GridGraph]) -> int:
    ks = {g.num_labels for g in grids}
    if len(ks) > 1:
        raise ValueError(f"grids use different label alphabets: {sorted(ks)}")
    if not ks:
        raise ValueError("no grids given")
    return ks.pop()


def iter_grid_features(grids: Sequence[GridGraph], config: PKConfig, B,
                       padding: str = "renormalized_zero") -> Iterator:
    k = _check_grids(grids)
    padding = _padding(padding)
    hashes = label_hashes(config, k)
    states = [g.initial_distribution() for g in grids]
    indicator = np.repeat(np.arange(len(grids)), [g.label_grid.size for g in grids])
    for t in range(config.t_max + 1):
        flat = np.vstack([P.reshape(-1, k) for P in states])
        bins = apply_hash(hashes[t], flat)
        yield count_features(bins, indicator, len(grids), t)
        if t < config.t_max:
            states = [convolve_step(P, B, padding) for P in states]


def grid_kernel(grids: Sequence[GridGraph], config: PKConfig, B="n1_4",
                padding: str = "renormalized_zero", *, keep_contributions: bool = False) -> KernelMatrix:
    """Propagation kernel between grid graphs; one shared hash per iteration."""
    if isinstance(B, str):
        B = filter_matrix(B)
    meta = asdict(config) | {"filter": getattr(B, "name", "custom"), "padding": _padding(padding)}
    return accumulate(iter_grid_features(grids, config, B, padding), len(grids), meta,
                      config.normalize, keep_contributions)


def grid_features(grids: List[GridGraph], config: PKConfig, B="n1_4", padding="renormalized_zero"):
    if isinstance(B, str):
        B = filter_matrix(B)
    return [phi.dense() for phi in iter_grid_features(grids, config, B, padding)]
