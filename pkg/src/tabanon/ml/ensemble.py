"""Tree ensembles: bagged forests, adaptive boosting, gradient boosting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .encoding import LabeledMatrix
from .tree import Tree, _is_binary, fit_classification_tree, fit_regression_tree

ALPHA_CAP = 1e3


def _sigmoid(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class TreeModel:
    tree: Tree

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        return self.tree.predict(X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)


def tree_fit(train: LabeledMatrix, max_depth: int) -> TreeModel:
    """Single gini CART over all features."""
    return TreeModel(fit_classification_tree(train.features, train.labels, max_depth))


@dataclass
class ForestModel:
    trees: list[Tree]

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)


def forest_fit(
    train: LabeledMatrix,
    max_depth: int,
    n_trees: int = 100,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    """Bagged gini trees: each tree sees a seeded bootstrap sample and considers
    ceil(sqrt(m)) random features per split. Tree i draws from seed + i, so the
    ensemble is reproducible regardless of fitting order.

    ``bootstrap=False`` is a test hook disabling both randomizations, which
    reduces a 1-tree forest to ``tree_fit``.
    """
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    X, y = train.features, train.labels
    n, m = X.shape
    binary = _is_binary(X)
    trees = []
    for i in range(n_trees):
        rng = np.random.default_rng(seed + i)
        if bootstrap:
            idx = rng.integers(0, n, size=n)
            trees.append(
                fit_classification_tree(
                    X[idx], y[idx], max_depth, rng=rng,
                    max_features=math.ceil(math.sqrt(m)), binary=binary,
                )
            )
        else:
            trees.append(fit_classification_tree(X, y, max_depth))
    return ForestModel(trees)


@dataclass
class AdaBoostModel:
    stumps: list[Tree]
    alphas: list[float]

    def _margin(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        margin = np.zeros(X.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            margin += alpha * np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
        return margin

    def staged_margins(self, X: np.ndarray) -> Iterator[np.ndarray]:
        X = np.asarray(X, dtype=float)
        margin = np.zeros(X.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            margin = margin + alpha * np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
            yield margin

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self._margin(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)


def adaboost_fit(
    train: LabeledMatrix,
    n_estimators: int,
    learning_rate: float,
    seed: int = 0,
) -> AdaBoostModel:
    """Discrete two-class boosting with depth-1 gini trees on reweighted data.

    Stage weight is learning_rate * ln((1 - err) / err), capped at |alpha| <=
    1e3. A stage with weighted error >= 0.5 is discarded and stops the loop; a
    perfect stage is kept with the capped weight and also stops.
    """
    if n_estimators < 1:
        raise ValueError(f"n_estimators must be >= 1, got {n_estimators}")
    if learning_rate <= 0:
        raise ValueError(f"learning_rate must be positive, got {learning_rate}")
    X = train.features
    y_pm = np.where(train.labels == 1, 1.0, -1.0)
    n = X.shape[0]
    w = np.full(n, 1.0 / n)
    binary = _is_binary(np.asarray(X, dtype=float))
    stumps: list[Tree] = []
    alphas: list[float] = []
    for _ in range(n_estimators):
        stump = fit_classification_tree(X, train.labels, 1, sample_weight=w, binary=binary)
        h = np.where(stump.predict(X) >= 0.5, 1.0, -1.0)
        miss = h != y_pm
        err = float(w[miss].sum())
        if err >= 0.5:
            break
        if err == 0.0:
            stumps.append(stump)
            alphas.append(ALPHA_CAP)
            break
        alpha = min(learning_rate * math.log((1.0 - err) / err), ALPHA_CAP)
        stumps.append(stump)
        alphas.append(alpha)
        w = w * np.exp(alpha * miss)
        w = w / w.sum()
    return AdaBoostModel(stumps, alphas)


@dataclass
class GBoostModel:
    base_score: float
    trees: list[Tree]
    learning_rate: float

    def _raw(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        raw = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            raw += self.learning_rate * tree.predict(X)
        return raw

    def staged_scores(self, X: np.ndarray) -> Iterator[np.ndarray]:
        X = np.asarray(X, dtype=float)
        raw = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            raw = raw + self.learning_rate * tree.predict(X)
            yield _sigmoid(raw)

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self._raw(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)


def gboost_fit(
    train: LabeledMatrix,
    n_estimators: int,
    learning_rate: float,
    max_depth: int,
    seed: int = 0,
) -> GBoostModel:
    """Binary log-loss gradient boosting.

    The constant stage is the log-odds of the training positives; each stage
    fits a squared-error regression tree to the residuals y - sigma(F) with
    one-Newton-step leaf values, scaled by the learning rate.
    """
    if n_estimators < 0:
        raise ValueError(f"n_estimators must be >= 0, got {n_estimators}")
    if learning_rate <= 0:
        raise ValueError(f"learning_rate must be positive, got {learning_rate}")
    X = train.features
    y = train.labels.astype(float)
    positives = float(y.sum())
    if positives == 0 or positives == y.size:
        raise ValueError("training labels are all one class; log-odds undefined")
    base = math.log(positives / (y.size - positives))
    raw = np.full(y.size, base)
    binary = _is_binary(np.asarray(X, dtype=float))
    trees: list[Tree] = []
    for _ in range(n_estimators):
        prob = _sigmoid(raw)
        grad = y - prob
        hess = prob * (1.0 - prob)
        tree = fit_regression_tree(X, grad, hess, max_depth, binary=binary)
        raw = raw + learning_rate * tree.predict(X)
        trees.append(tree)
    return GBoostModel(base, trees, learning_rate)


def log_loss(labels: np.ndarray, scores: np.ndarray) -> float:
    """Mean binary cross-entropy with probability clipping for stability."""
    y = np.asarray(labels, dtype=float)
    p = np.clip(np.asarray(scores, dtype=float), 1e-15, 1.0 - 1e-15)
    return float(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)).mean())
