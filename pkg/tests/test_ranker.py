import json

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from zooscore.ranker import PairwiseRanker, RankerModel, predict_model


def separable_pair():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    y = np.array([1.0, 0.0])
    g = np.array(["d", "d"])
    return X, y, g


def test_separable_pair_orders_scores():
    X, y, g = separable_pair()
    est = PairwiseRanker(rounds=10, max_depth=2, min_leaf=1)
    est.fit(X, y, g)
    scores = est.predict(X)
    assert scores[0] > scores[1]


def test_training_loss_non_increasing():
    rng = np.random.default_rng(0)
    X = rng.random((40, 5))
    y = X[:, 0] + 0.1 * rng.random(40)
    g = np.repeat(np.arange(4), 10)
    est = PairwiseRanker(rounds=60, min_leaf=1)
    est.fit(X, y, g)
    losses = est.train_loss_
    assert all(a >= b - 1e-9 for a, b in zip(losses, losses[1:]))


def test_zero_tree_model_predicts_zero():
    model = RankerModel(trees=(), learning_rate=0.1, feature_schema=("f0",), train_config=est_config())
    assert predict_model(model, np.zeros((3, 1))).tolist() == [0.0, 0.0, 0.0]


def est_config():
    from zooscore.ranker import TrainConfig

    return TrainConfig()


def test_identical_features_identical_scores():
    X, y, g = separable_pair()
    est = PairwiseRanker(rounds=5, min_leaf=1).fit(X, y, g)
    twin = np.array([[0.5, 0.5], [0.5, 0.5]])
    scores = est.predict(twin)
    assert scores[0] == scores[1]


def test_predict_order_invariant():
    rng = np.random.default_rng(1)
    X = rng.random((30, 4))
    y = rng.random(30)
    g = np.repeat(np.arange(3), 10)
    est = PairwiseRanker(rounds=20, min_leaf=1).fit(X, y, g)
    Xq = rng.random((12, 4))
    direct = est.predict(Xq)
    perm = rng.permutation(12)
    permuted = est.predict(Xq[perm])
    assert np.allclose(direct[perm], permuted)


def test_fit_deterministic():
    rng = np.random.default_rng(2)
    X = rng.random((24, 3))
    y = rng.random(24)
    g = np.repeat(np.arange(4), 6)
    a = PairwiseRanker(rounds=15, min_leaf=1).fit(X, y, g)
    b = PairwiseRanker(rounds=15, min_leaf=1).fit(X, y, g)
    assert a.to_model().to_document() == b.to_model().to_document()


def test_serialization_round_trip():
    X, y, g = separable_pair()
    est = PairwiseRanker(rounds=8, min_leaf=1).fit(X, y, g)
    model = est.to_model(feature_schema=["a", "b"], train_groups=["d"])
    doc = json.loads(json.dumps(model.to_document()))
    again = RankerModel.from_document(doc)
    assert np.allclose(predict_model(model, X), predict_model(again, X))
    assert again.feature_schema == ("a", "b")
    assert again.train_groups == ("d",)


def test_schema_mismatch_errors():
    X, y, g = separable_pair()
    est = PairwiseRanker(rounds=3, min_leaf=1).fit(X, y, g)
    model = est.to_model()
    with pytest.raises(ValueError, match="schema"):
        predict_model(model, np.zeros((2, 5)))


def test_no_orderable_pairs_errors():
    X = np.zeros((4, 2))
    y = np.ones(4)  # constant relevance: nothing to order
    g = np.array(["d"] * 4)
    with pytest.raises(ValueError, match="orderable"):
        PairwiseRanker(rounds=3).fit(X, y, g)


def test_pairs_stay_within_groups():
    # Group A prefers feature 0, group B reversed labels; cross-group
    # leakage would cancel the signal entirely.
    X = np.array([[1.0], [0.0], [1.0], [0.0]])
    y = np.array([1.0, 0.0, 0.0, 1.0])
    g = np.array(["A", "A", "B", "B"])
    est = PairwiseRanker(rounds=10, max_depth=1, min_leaf=1).fit(X, y, g)
    assert len(est.trees_) == 10


def test_sklearn_protocol():
    est = PairwiseRanker(rounds=7, learning_rate=0.2)
    params = est.get_params()
    assert params["rounds"] == 7 and params["learning_rate"] == 0.2
    cloned = clone(est)
    assert cloned.get_params() == params
    est.set_params(rounds=3)
    assert est.rounds == 3
    with pytest.raises(NotFittedError):
        est.predict(np.zeros((1, 2)))


def test_unfitted_to_model_errors():
    with pytest.raises(NotFittedError):
        PairwiseRanker().to_model()
