"""Gradient-boosted regression trees with a pairwise ranking objective.

`PairwiseRanker` follows the scikit-learn estimator protocol (fit /
predict / get_params) so it composes with the wider ecosystem. For each
within-group pair whose relevances are ordered, the logistic pairwise
loss log(1 + exp(-(s_i - s_j))) contributes a gradient of -1/(1 + e^m)
to the preferred item and +1/(1 + e^m) to the other (m = s_i - s_j),
with curvature e^m / (1 + e^m)^2 on both. Each round fits one regression
tree to the accumulated gradients with Newton leaf values, exact greedy
axis-aligned splits, and deterministic tie-breaking, so training is
reproducible from the inputs alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array


@dataclass(frozen=True)
class TrainConfig:
    rounds: int = 200
    max_depth: int = 4
    learning_rate: float = 0.1
    min_leaf: int = 2
    reg_lambda: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class RankerModel:
    """Serialized ensemble: schema-stamped trees plus training config."""

    trees: tuple[dict, ...]
    learning_rate: float
    feature_schema: tuple[str, ...]
    train_config: TrainConfig
    train_groups: tuple[str, ...] = ()
    train_loss: tuple[float, ...] = ()

    def to_document(self) -> dict:
        return {
            "schema": list(self.feature_schema),
            "learning_rate": self.learning_rate,
            "trees": [json.loads(json.dumps(t)) for t in self.trees],
            "config": {
                "rounds": self.train_config.rounds,
                "max_depth": self.train_config.max_depth,
                "learning_rate": self.train_config.learning_rate,
                "min_leaf": self.train_config.min_leaf,
                "reg_lambda": self.train_config.reg_lambda,
                "seed": self.train_config.seed,
            },
            "train_groups": list(self.train_groups),
            "train_loss": list(self.train_loss),
        }

    @staticmethod
    def from_document(doc: dict) -> "RankerModel":
        cfg = doc.get("config", {})
        return RankerModel(
            trees=tuple(doc["trees"]),
            learning_rate=float(doc["learning_rate"]),
            feature_schema=tuple(doc["schema"]),
            train_config=TrainConfig(
                rounds=int(cfg.get("rounds", 0)),
                max_depth=int(cfg.get("max_depth", 0)),
                learning_rate=float(cfg.get("learning_rate", doc["learning_rate"])),
                min_leaf=int(cfg.get("min_leaf", 1)),
                reg_lambda=float(cfg.get("reg_lambda", 1.0)),
                seed=int(cfg.get("seed", 0)),
            ),
            train_groups=tuple(doc.get("train_groups", [])),
            train_loss=tuple(doc.get("train_loss", [])),
        )


def _tree_apply(node: dict, x: np.ndarray) -> float:
    while "leaf" not in node:
        node = node["left"] if x[node["feature"]] < node["threshold"] else node["right"]
    return node["leaf"]


def _tree_apply_matrix(node: dict, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])

    def fill(sub: dict, rows: np.ndarray) -> None:
        if "leaf" in sub:
            out[rows] = sub["leaf"]
            return
        left = X[rows, sub["feature"]] < sub["threshold"]
        fill(sub["left"], rows[left])
        fill(sub["right"], rows[~left])

    fill(node, np.arange(X.shape[0]))
    return out


def predict_model(model: RankerModel, X: np.ndarray) -> np.ndarray:
    """Deterministic ensemble sum; row order never affects any score."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(model.feature_schema):
        raise ValueError(
            f"feature matrix of shape {X.shape} does not match schema of length {len(model.feature_schema)}"
        )
    scores = np.zeros(X.shape[0])
    for tree in model.trees:
        scores += model.learning_rate * _tree_apply_matrix(tree, X)
    return scores


class PairwiseRanker(BaseEstimator):
    """Pairwise-objective GBDT ranker with a scikit-learn interface.

    Parameters mirror `TrainConfig`; `fit` takes a group vector aligned
    with the rows (one identifier per sample) and forms training pairs
    only within a group.
    """

    def __init__(self, rounds=200, max_depth=4, learning_rate=0.1, min_leaf=2, reg_lambda=1.0, seed=0):
        self.rounds = rounds
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.min_leaf = min_leaf
        self.reg_lambda = reg_lambda
        self.seed = seed

    # -- scikit-learn protocol ------------------------------------------

    def fit(self, X, y, group):
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        group = np.asarray(group)
        if y.shape[0] != X.shape[0] or group.shape[0] != X.shape[0]:
            raise ValueError("X, y, and group must have the same number of rows")
        pairs = self._build_pairs(y, group)
        if pairs.shape[0] == 0:
            raise ValueError("no orderable within-group pairs; cannot train a pairwise ranker")

        self.n_features_in_ = X.shape[1]
        scores = np.zeros(X.shape[0])
        trees: list[dict] = []
        losses: list[float] = [self._loss(scores, pairs)]
        for _ in range(self.rounds):
            grad, hess = self._gradients(scores, pairs, X.shape[0])
            tree = self._grow_tree(X, grad, hess, np.arange(X.shape[0]), depth=0)
            update = self.learning_rate * _tree_apply_matrix(tree, X)
            # The Newton direction always has negative inner product with
            # the gradient; halve the step if the damped move still
            # overshoots, so the training loss is monotone by construction.
            scale = 1.0
            for _attempt in range(30):
                candidate = self._loss(scores + scale * update, pairs)
                if candidate <= losses[-1]:
                    break
                scale *= 0.5
            else:
                scale = 0.0
                candidate = losses[-1]
            if scale != 1.0:
                tree = _scale_tree(tree, scale)
                update = update * scale
            scores = scores + update
            trees.append(tree)
            losses.append(candidate)
        self.trees_ = trees
        self.train_loss_ = losses
        return self

    def predict(self, X):
        if not hasattr(self, "trees_"):
            raise NotFittedError("PairwiseRanker is not fitted; call fit first")
        return predict_model(self.to_model(), np.asarray(X, dtype=np.float64))

    # -- serialization ----------------------------------------------------

    def to_model(self, feature_schema: list[str] | None = None, train_groups: list[str] | None = None) -> RankerModel:
        if not hasattr(self, "trees_"):
            raise NotFittedError("PairwiseRanker is not fitted; call fit first")
        schema = feature_schema or [f"f{i}" for i in range(self.n_features_in_)]
        if len(schema) != self.n_features_in_:
            raise ValueError("feature schema length does not match the fitted feature count")
        return RankerModel(
            trees=tuple(self.trees_),
            learning_rate=self.learning_rate,
            feature_schema=tuple(schema),
            train_config=TrainConfig(
                rounds=self.rounds,
                max_depth=self.max_depth,
                learning_rate=self.learning_rate,
                min_leaf=self.min_leaf,
                reg_lambda=self.reg_lambda,
                seed=self.seed,
            ),
            train_groups=tuple(train_groups or ()),
            train_loss=tuple(self.train_loss_),
        )

    # -- internals --------------------------------------------------------

    @staticmethod
    def _build_pairs(y: np.ndarray, group: np.ndarray) -> np.ndarray:
        pairs = []
        for g in sorted(set(group.tolist()), key=str):
            idx = np.flatnonzero(group == g)
            for a in range(len(idx)):
                for b in range(len(idx)):
                    if y[idx[a]] > y[idx[b]]:
                        pairs.append((idx[a], idx[b]))
        return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)

    @staticmethod
    def _loss(scores: np.ndarray, pairs: np.ndarray) -> float:
        margins = scores[pairs[:, 0]] - scores[pairs[:, 1]]
        return float(np.logaddexp(0.0, -margins).sum())

    @staticmethod
    def _gradients(scores: np.ndarray, pairs: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
        margins = scores[pairs[:, 0]] - scores[pairs[:, 1]]
        # Stable 1 / (1 + e^m); d/dm of log(1 + e^-m) is -sig.
        exp_neg = np.exp(-np.clip(margins, 0.0, None))
        exp_pos = np.exp(np.clip(margins, None, 0.0))
        sig = np.where(margins >= 0, exp_neg / (1.0 + exp_neg), 1.0 / (1.0 + exp_pos))
        curv = sig * (1.0 - sig)
        grad = np.zeros(n)
        hess = np.zeros(n)
        np.add.at(grad, pairs[:, 0], -sig)
        np.add.at(grad, pairs[:, 1], sig)
        np.add.at(hess, pairs[:, 0], curv)
        np.add.at(hess, pairs[:, 1], curv)
        return grad, hess

    def _leaf_value(self, grad_sum: float, hess_sum: float) -> float:
        return -grad_sum / (hess_sum + self.reg_lambda)

    def _grow_tree(self, X, grad, hess, indices, depth) -> dict:
        g_node = grad[indices]
        h_node = hess[indices]
        g_total = g_node.sum()
        h_total = h_node.sum()
        n = len(indices)
        if depth >= self.max_depth or n < 2 * self.min_leaf:
            return {"leaf": self._leaf_value(g_total, h_total)}
        base_score = g_total * g_total / (h_total + self.reg_lambda)
        cuts = np.arange(self.min_leaf, n - self.min_leaf + 1)
        best = None  # (gain, feature, threshold); first feature wins ties
        for feature in range(X.shape[1]):
            column = X[indices, feature]
            order = np.argsort(column, kind="stable")
            sorted_vals = column[order]
            valid = sorted_vals[cuts - 1] != sorted_vals[cuts]
            if not valid.any():
                continue
            gl = np.cumsum(g_node[order])[cuts - 1]
            hl = np.cumsum(h_node[order])[cuts - 1]
            gains = np.where(
                valid,
                gl**2 / (hl + self.reg_lambda)
                + (g_total - gl) ** 2 / (h_total - hl + self.reg_lambda)
                - base_score,
                -np.inf,
            )
            i = int(np.argmax(gains))  # first max: lowest threshold wins ties
            if gains[i] > 1e-12 and (best is None or gains[i] > best[0] + 1e-15):
                best = (float(gains[i]), feature, float(0.5 * (sorted_vals[cuts[i] - 1] + sorted_vals[cuts[i]])))
        if best is None:
            return {"leaf": self._leaf_value(g_total, h_total)}
        _, feature, threshold = best
        left = indices[X[indices, feature] < threshold]
        right = indices[X[indices, feature] >= threshold]
        return {
            "feature": int(feature),
            "threshold": threshold,
            "left": self._grow_tree(X, grad, hess, left, depth + 1),
            "right": self._grow_tree(X, grad, hess, right, depth + 1),
        }


def _scale_tree(node: dict, scale: float) -> dict:
    if "leaf" in node:
        return {"leaf": node["leaf"] * scale}
    return {
        "feature": node["feature"],
        "threshold": node["threshold"],
        "left": _scale_tree(node["left"], scale),
        "right": _scale_tree(node["right"], scale),
    }
