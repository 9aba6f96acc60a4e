"""One-step propagation schemes on stacked label distributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

SCHEMES = ("diffusion", "label_propagation")
_ALIASES = {"labelprop": "label_propagation", "lp": "label_propagation"}


def _check(T, P):
    if T.shape[0] != T.shape[1] or T.shape[1] != P.shape[0]:
        raise ValueError(f"transition {T.shape} incompatible with distributions {P.shape}")


def diffusion_step(T, P) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    _check(T, P)
    return np.asarray(T @ P)


def push_back(P, P0, mask) -> np.ndarray:
    """Reset the rows of originally labeled nodes to their initial distribution."""
    P = np.array(P, dtype=np.float64, copy=True)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (P.shape[0],):
        raise ValueError("mask length must equal number of rows")
    P[mask] = P0[mask]
    return P


def label_propagation_step(T, P, P0, mask) -> np.ndarray:
    return diffusion_step(T, push_back(P, P0, mask))


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    scheme: str = "diffusion"
    observed_mask: Optional[np.ndarray] = None

    def __post_init__(self):
        name = _ALIASES.get(self.scheme, self.scheme)
        if name not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "scheme", name)
        if name == "label_propagation" and self.observed_mask is None:
            raise ValueError("label propagation needs an observed-node mask")

    def step(self, T, P, P0) -> np.ndarray:
        if self.scheme == "diffusion":
            return diffusion_step(T, P)
        return label_propagation_step(T, P, P0, self.observed_mask)
