"""From-scratch CART trees: gini classification and squared-error regression.

Splits are chosen over midpoints of sorted distinct feature values; ties in
gain break by lowest feature index, then lowest threshold. When every feature
value is 0 or 1 (one-hot matrices) the only candidate threshold per feature is
0.5 and all split statistics come from one matrix product per node, which is
what makes ensemble training on encoded tables fast. Node submatrices are
sliced and passed down the recursion so no step re-gathers rows from the full
training matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Tree:
    """Fitted tree as parallel node arrays; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        current = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feats = self.feature[current]
            active = np.nonzero(feats >= 0)[0]
            if active.size == 0:
                return self.value[current]
            nodes = current[active]
            go_left = X[active, feats[active]] <= self.threshold[nodes]
            current[active] = np.where(go_left, self.left[nodes], self.right[nodes])

    @property
    def node_count(self) -> int:
        return len(self.feature)


class _TreeBuilder:
    def __init__(self) -> None:
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def make_split(self, node_id: int, feature: int, threshold: float) -> None:
        self.feature[node_id] = feature
        self.threshold[node_id] = threshold

    def done(self) -> Tree:
        return Tree(
            np.array(self.feature, dtype=np.int64),
            np.array(self.threshold, dtype=float),
            np.array(self.left, dtype=np.int64),
            np.array(self.right, dtype=np.int64),
            np.array(self.value, dtype=float),
        )


def _is_binary(X: np.ndarray) -> bool:
    return bool(((X == 0.0) | (X == 1.0)).all())


def _split_binary(
    Xn: np.ndarray, target: np.ndarray, weight: np.ndarray, feats: np.ndarray | None, gini: bool
) -> tuple[float, int, float] | None:
    """Best 0.5-threshold split over 0/1 features via one column-sum product."""
    sub = Xn if feats is None else Xn[:, feats]
    wt = weight * target
    w_total = weight.sum()
    wt_total = wt.sum()
    sums = sub.T @ np.column_stack((weight, wt))
    w1 = sums[:, 0]
    t1 = sums[:, 1]
    w0 = w_total - w1
    t0 = wt_total - t1
    valid = (w1 > 0) & (w0 > 0)
    if not valid.any():
        return None
    with np.errstate(invalid="ignore", divide="ignore"):
        if gini:
            p1 = np.where(valid, t1 / w1, 0.0)
            p0 = np.where(valid, t0 / w0, 0.0)
            pp = wt_total / w_total
            parent = 2.0 * pp * (1.0 - pp)
            gain = parent - (w0 * (2.0 * p0 * (1.0 - p0)) + w1 * (2.0 * p1 * (1.0 - p1))) / w_total
        else:
            gain = (
                np.where(valid, t0 * t0 / w0, 0.0)
                + np.where(valid, t1 * t1 / w1, 0.0)
                - wt_total * wt_total / w_total
            )
    gain = np.where(valid, gain, -np.inf)
    j = int(np.argmax(gain))
    if not gain[j] > 0.0:
        return None
    return float(gain[j]), int(j if feats is None else feats[j]), 0.5


def _split_sorted(
    Xn: np.ndarray, target: np.ndarray, weight: np.ndarray, feats: np.ndarray | None, gini: bool
) -> tuple[float, int, float] | None:
    """Best split over midpoints of sorted distinct values, any numeric features."""
    if feats is None:
        feats = np.arange(Xn.shape[1])
    w_total = weight.sum()
    wt = weight * target
    wt_total = wt.sum()
    if gini:
        pp = wt_total / w_total
        parent = 2.0 * pp * (1.0 - pp)
    best: tuple[float, int, float] | None = None
    for f in feats:
        col = Xn[:, f]
        order = np.argsort(col, kind="stable")
        sc = col[order]
        cuts = np.nonzero(sc[1:] != sc[:-1])[0]
        if cuts.size == 0:
            continue
        cw = np.cumsum(weight[order])
        ct = np.cumsum(wt[order])
        w_l, t_l = cw[cuts], ct[cuts]
        w_r, t_r = w_total - w_l, wt_total - t_l
        valid = (w_l > 0) & (w_r > 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            if gini:
                p_l = np.where(valid, t_l / w_l, 0.0)
                p_r = np.where(valid, t_r / w_r, 0.0)
                gain = parent - (
                    w_l * (2.0 * p_l * (1.0 - p_l)) + w_r * (2.0 * p_r * (1.0 - p_r))
                ) / w_total
            else:
                gain = (
                    np.where(valid, t_l * t_l / w_l, 0.0)
                    + np.where(valid, t_r * t_r / w_r, 0.0)
                    - wt_total * wt_total / w_total
                )
        gain = np.where(valid, gain, -np.inf)
        j = int(np.argmax(gain))
        if gain[j] > 0.0 and (best is None or gain[j] > best[0]):
            best = (float(gain[j]), int(f), float((sc[cuts[j]] + sc[cuts[j] + 1]) / 2.0))
    return best


def _choose_features(
    m: int, rng: np.random.Generator | None, max_features: int | None
) -> np.ndarray | None:
    if max_features is None or max_features >= m:
        return None
    return np.sort(rng.choice(m, size=max_features, replace=False))


def _grow_gini(
    builder: _TreeBuilder,
    Xn: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    depth: int,
    max_depth: int,
    binary: bool,
    rng: np.random.Generator | None,
    max_features: int | None,
) -> int:
    node_id = builder.add(float((w * y).sum() / w.sum()))
    if depth >= max_depth or y.size < 2 or y.min() == y.max():
        return node_id
    feats = _choose_features(Xn.shape[1], rng, max_features)
    split_fn = _split_binary if binary else _split_sorted
    found = split_fn(Xn, y, w, feats, True)
    if found is None:
        return node_id
    _, feat, thr = found
    go_left = Xn[:, feat] <= thr
    builder.make_split(node_id, feat, thr)
    left = _grow_gini(builder, Xn[go_left], y[go_left], w[go_left],
                      depth + 1, max_depth, binary, rng, max_features)
    go_right = ~go_left
    right = _grow_gini(builder, Xn[go_right], y[go_right], w[go_right],
                       depth + 1, max_depth, binary, rng, max_features)
    builder.left[node_id] = left
    builder.right[node_id] = right
    return node_id


def _grow_regression(
    builder: _TreeBuilder,
    Xn: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    ones: np.ndarray,
    depth: int,
    max_depth: int,
    binary: bool,
) -> int:
    h_total = hess.sum()
    node_id = builder.add(0.0 if h_total <= 1e-12 else float(grad.sum() / h_total))
    if depth >= max_depth or grad.size < 2 or grad.min() == grad.max():
        return node_id
    split_fn = _split_binary if binary else _split_sorted
    found = split_fn(Xn, grad, ones, None, False)
    if found is None:
        return node_id
    _, feat, thr = found
    go_left = Xn[:, feat] <= thr
    builder.make_split(node_id, feat, thr)
    left = _grow_regression(builder, Xn[go_left], grad[go_left], hess[go_left],
                            ones[: int(go_left.sum())], depth + 1, max_depth, binary)
    go_right = ~go_left
    right = _grow_regression(builder, Xn[go_right], grad[go_right], hess[go_right],
                             ones[: int(go_right.sum())], depth + 1, max_depth, binary)
    builder.left[node_id] = left
    builder.right[node_id] = right
    return node_id


def fit_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    sample_weight: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
    max_features: int | None = None,
    binary: bool | None = None,
) -> Tree:
    """Gini-impurity CART; leaf value is the (weighted) positive fraction.

    ``binary`` short-circuits the all-0/1 feature scan when the caller already
    knows the answer (ensembles refitting over one matrix).
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    w = np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    builder = _TreeBuilder()
    _grow_gini(builder, X, y, w, 0, max_depth,
               _is_binary(X) if binary is None else binary, rng, max_features)
    return builder.done()


def fit_regression_tree(
    X: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    max_depth: int,
    binary: bool | None = None,
) -> Tree:
    """Squared-error splits on ``grad``; leaf value is the Newton step sum(g)/sum(h)."""
    X = np.ascontiguousarray(X, dtype=float)
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    builder = _TreeBuilder()
    _grow_regression(builder, X, grad, hess, np.ones(X.shape[0]), 0, max_depth,
                     _is_binary(X) if binary is None else binary)
    return builder.done()
