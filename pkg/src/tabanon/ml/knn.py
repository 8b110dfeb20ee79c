"""k-nearest-neighbour scoring under Minkowski distance with exponent 2."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import LabeledMatrix

_CHUNK = 256


@dataclass
class KnnModel:
    """Stored training matrix; score = positive fraction among nearest rows."""

    train_features: np.ndarray
    train_labels: np.ndarray
    neighbors: int

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        return neighbor_scores(
            self.train_features, self.train_labels, np.asarray(X, dtype=float), [self.neighbors]
        )[self.neighbors]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)


def knn_fit(train: LabeledMatrix, neighbors: int) -> KnnModel:
    if not 1 <= neighbors <= train.n:
        raise ValueError(f"neighbors must be in 1..{train.n}, got {neighbors}")
    return KnnModel(train.features, train.labels, neighbors)


def knn_predict(model: KnnModel, X: np.ndarray) -> np.ndarray:
    return model.predict_score(X)


def neighbor_scores(
    train_features: np.ndarray,
    train_labels: np.ndarray,
    test_features: np.ndarray,
    neighbor_counts: list[int],
) -> dict[int, np.ndarray]:
    """Scores for several neighbour counts from one distance computation.

    Distances are squared Euclidean (order-equivalent to the exponent-2
    Minkowski metric); ties break toward the lower training-row index via a
    stable sort.
    """
    kmax = max(neighbor_counts)
    if not 1 <= kmax <= train_features.shape[0]:
        raise ValueError(f"neighbors must be in 1..{train_features.shape[0]}, got {kmax}")
    train_sq = (train_features * train_features).sum(axis=1)
    labels = train_labels.astype(float)
    out = {k: np.empty(test_features.shape[0]) for k in neighbor_counts}
    for start in range(0, test_features.shape[0], _CHUNK):
        chunk = test_features[start : start + _CHUNK]
        d = (chunk * chunk).sum(axis=1)[:, None] + train_sq[None, :] - 2.0 * (chunk @ train_features.T)
        order = np.argsort(d, axis=1, kind="stable")[:, :kmax]
        cum = np.cumsum(labels[order], axis=1)
        for k in neighbor_counts:
            out[k][start : start + chunk.shape[0]] = cum[:, k - 1] / k
    return out
