"""Kernel k-nearest-neighbor cross-validation on precomputed Gram matrices.

Folds are assigned on a canonical graph order derived from the kernel
values and class labels, not on input order, so permuting the graphs (and
the Gram matrix with them) leaves every reported number unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np


@dataclass
class EvalReport:
    accuracies: np.ndarray  # runs x folds
    run_accuracies: np.ndarray
    mean: float
    stderr: float
    config: dict = field(default_factory=dict)
    selected: list = field(default_factory=list)

    def lines(self) -> List[str]:
        out = ["fold,run,accuracy"]
        for r, row in enumerate(self.accuracies):
            for f, acc in enumerate(row):
                out.append(f"{f},{r},{acc:.6f}")
        out.append(f"summary,mean={self.mean:.6f},stderr={self.stderr:.6f},"
                   f"runs={self.accuracies.shape[0]},folds={self.accuracies.shape[1]}")
        return out


def kernel_distances(K) -> np.ndarray:
    """Squared kernel-induced distances, clipped at zero."""
    K = np.asarray(K, dtype=np.float64)
    d = np.diag(K)
    D2 = d[:, None] + d[None, :] - 2.0 * K
    return np.maximum(D2, 0.0)


def canonical_order(K, classes) -> np.ndarray:
    """Rank of every graph in an order that depends only on its kernel row and class."""
    K = np.asarray(K, dtype=np.float64)
    rows = np.sort(K, axis=1)
    keys = [rows[:, j] for j in range(rows.shape[1] - 1, -1, -1)] + [np.diag(K), np.asarray(classes)]
    order = np.lexsort(keys)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank


def stratified_folds(classes, folds: int, rng: np.random.Generator, rank=None) -> np.ndarray:
    """Fold id per graph; every class is dealt round-robin after a random shuffle."""
    classes = np.asarray(classes)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    labels, sizes = np.unique(classes, return_counts=True)
    if sizes.min() < folds:
        small = labels[np.argmin(sizes)]
        raise ValueError(f"class {small} has {sizes.min()} members, fewer than {folds} folds")
    rank = np.arange(classes.size) if rank is None else np.asarray(rank)
    fold = np.empty(classes.size, dtype=np.int64)
    offset = 0
    for c in labels:
        members = np.flatnonzero(classes == c)
        members = members[np.argsort(rank[members], kind="stable")]
        members = members[rng.permutation(members.size)]
        fold[members] = (offset + np.arange(members.size)) % folds
        offset += members.size
    return fold


def knn_predict(D2, train, test, classes, k_nn: int, rank) -> np.ndarray:
    """Majority vote among the ``k_nn`` nearest training graphs.

    Ties among equidistant neighbors go to the lower canonical rank; vote
    ties go to the class with the smaller distance sum, then the lower label.
    """
    k = min(k_nn, train.size)
    pred = np.empty(test.size, dtype=np.int64)
    for pos, x in enumerate(test):
        d = D2[x, train]
        order = np.lexsort((rank[train], d))[:k]
        near, dist = classes[train[order]], np.sqrt(d[order])
        labels = np.unique(near)
        votes = np.array([(near == c).sum() for c in labels])
        sums = np.array([dist[near == c].sum() for c in labels])
        best = np.lexsort((labels, sums, -votes))[0]
        pred[pos] = labels[best]
    return pred


def _check(K, classes):
    K = np.asarray(K, dtype=np.float64)
    classes = np.asarray(classes, dtype=np.int64)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != classes.size:
        raise ValueError(f"Gram matrix {K.shape} does not match {classes.size} class labels")
    return K, classes


def _summarize(acc, run_acc, config, selected=None) -> EvalReport:
    runs = run_acc.size
    stderr = float(run_acc.std(ddof=1) / np.sqrt(runs)) if runs > 1 else 0.0
    return EvalReport(acc, run_acc, float(run_acc.mean()), stderr, config, selected or [])


def evaluate(K, classes, folds: int = 10, runs: int = 10, k_nn: int = 1, seed: int = 0) -> EvalReport:
    """Repeated stratified cross-validation of kernel k-NN on a precomputed Gram matrix."""
    K, classes = _check(K, classes)
    if k_nn < 1 or runs < 1:
        raise ValueError("k_nn and runs must be >= 1")
    rank = canonical_order(K, classes)
    D2 = kernel_distances(K)
    rng = np.random.default_rng(seed)
    acc = np.zeros((runs, folds))
    run_acc = np.zeros(runs)
    for r in range(runs):
        fold = stratified_folds(classes, folds, rng, rank)
        correct = 0
        for f in range(folds):
            test, train = np.flatnonzero(fold == f), np.flatnonzero(fold != f)
            hits = knn_predict(D2, train, test, classes, k_nn, rank) == classes[test]
            acc[r, f] = hits.mean()
            correct += hits.sum()
        run_acc[r] = correct / classes.size
    return _summarize(acc, run_acc, dict(folds=folds, runs=runs, k_nn=k_nn, seed=seed))


def _inner_accuracy(D2, train, classes, folds, k_nn, rank, rng) -> float:
    sub = classes[train]
    inner = min(folds, int(np.unique(sub, return_counts=True)[1].min()))
    if inner < 2:
        return 0.0
    fold = stratified_folds(sub, inner, rng, rank[train])
    correct = 0
    for f in range(inner):
        te, tr = train[fold == f], train[fold != f]
        correct += (knn_predict(D2, tr, te, classes, k_nn, rank) == classes[te]).sum()
    return correct / train.size


def evaluate_selected(kernels: Sequence, classes, folds: int = 10, runs: int = 10, k_nn: int = 1,
                      seed: int = 0) -> EvalReport:
    """Cross-validation where the kernel (e.g. the iteration count) is picked per
    outer fold by an inner cross-validation on the training part only."""
    mats = [_check(K, classes)[0] for K in kernels]
    classes = np.asarray(classes, dtype=np.int64)
    rank = canonical_order(mats[-1], classes)
    D2s = [kernel_distances(K) for K in mats]
    rng = np.random.default_rng(seed)
    acc = np.zeros((runs, folds))
    run_acc = np.zeros(runs)
    selected = []
    for r in range(runs):
        fold = stratified_folds(classes, folds, rng, rank)
        correct = 0
        for f in range(folds):
            test, train = np.flatnonzero(fold == f), np.flatnonzero(fold != f)
            inner_seed = rng.integers(2**32)
            scores = [_inner_accuracy(D2, train, classes, folds, k_nn, rank, np.random.default_rng(inner_seed))
                      for D2 in D2s]
            best = int(np.argmax(scores))
            selected.append(best)
            hits = knn_predict(D2s[best], train, test, classes, k_nn, rank) == classes[test]
            acc[r, f] = hits.mean()
            correct += hits.sum()
        run_acc[r] = correct / classes.size
    return _summarize(acc, run_acc, dict(folds=folds, runs=runs, k_nn=k_nn, seed=seed,
                                         candidates=len(mats)), selected)
