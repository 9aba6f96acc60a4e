import numpy as np
import pytest

from propkern.evaluate import canonical_order, evaluate, evaluate_selected, kernel_distances, stratified_folds


def block_gram(per_class=10, classes=2):
    y = np.repeat(np.arange(classes), per_class)
    return (y[:, None] == y[None, :]).astype(float), y


def test_separable_gram_is_perfect():
    K, y = block_gram()
    rep = evaluate(K, y, folds=5, runs=3)
    assert rep.mean == 1.0 and rep.stderr == 0.0
    assert rep.accuracies.shape == (3, 5)


def test_identity_gram_deterministic():
    y = np.repeat([0, 1], 10)
    a = evaluate(np.eye(20), y, folds=5, runs=4, seed=3)
    b = evaluate(np.eye(20), y, folds=5, runs=4, seed=3)
    assert a.lines() == b.lines()
    # all distances tie, so the vote goes to the training neighbor of lowest canonical rank
    assert 0.0 <= a.mean <= 1.0


def test_permutation_equivariance():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(30, 4))
    y = (X[:, 0] > 0).astype(int)
    y[:3], y[-3:] = 0, 1
    K = X @ X.T
    perm = rng.permutation(30)
    a = evaluate(K, y, folds=3, runs=5, k_nn=3, seed=7)
    b = evaluate(K[np.ix_(perm, perm)], y[perm], folds=3, runs=5, k_nn=3, seed=7)
    assert a.lines() == b.lines()


def test_report_lines():
    K, y = block_gram(4)
    lines = evaluate(K, y, folds=2, runs=2).lines()
    assert lines[0] == "fold,run,accuracy"
    assert len(lines) == 1 + 4 + 1
    assert lines[-1] == "summary,mean=1.000000,stderr=0.000000,runs=2,folds=2"


def test_rejects_small_class():
    y = np.array([0] * 10 + [1] * 3)
    with pytest.raises(ValueError, match="class 1"):
        evaluate(np.eye(13), y, folds=5)
    with pytest.raises(ValueError):
        evaluate(np.eye(3), [0, 1], folds=2)
    with pytest.raises(ValueError):
        stratified_folds(np.zeros(4), 1, np.random.default_rng(0))


def test_folds_are_stratified():
    y = np.repeat([0, 1, 2], [10, 20, 30])
    fold = stratified_folds(y, 10, np.random.default_rng(1))
    for f in range(10):
        assert np.bincount(y[fold == f], minlength=3).tolist() == [1, 2, 3]


def test_distances_and_rank():
    K = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert kernel_distances(K).tolist() == [[0.0, 2.0], [2.0, 0.0]]
    assert sorted(canonical_order(K, [1, 0]).tolist()) == [0, 1]


def test_selection_picks_informative_kernel():
    K, y = block_gram(10)
    noise = np.eye(20)
    rep = evaluate_selected([noise, K], y, folds=5, runs=2)
    assert rep.mean == 1.0
    assert set(rep.selected) == {1}
