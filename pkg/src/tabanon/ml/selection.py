"""Cross-validated grid search over the five model families.

Grid points are enumerated with parameter names sorted alphabetically and each
value list in its written order; ties on mean validation accuracy keep the
earliest point. Folds are stratified and seeded. Families whose fits are
prefixes of longer fits (neighbour counts, boosting stages) are evaluated in
staged form, which returns exactly the same scores as refitting per point.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encoding import LabeledMatrix
from .ensemble import adaboost_fit, forest_fit, gboost_fit, tree_fit
from .knn import knn_fit, neighbor_scores

FAMILIES = ("knn", "tree", "random_forest", "adaboost", "gradient_boosting")


def default_grids() -> dict[str, dict[str, list]]:
    """The full hyperparameter grids used by the evaluation harness."""
    return {
        "knn": {"neighbors": list(range(3, 51))},
        "tree": {"max_depth": list(range(2, 10))},
        "random_forest": {"max_depth": list(range(2, 10))},
        "adaboost": {"n_estimators": [50, 100, 150], "learning_rate": [0.01, 0.1, 0.5, 1.0]},
        "gradient_boosting": {
            "n_estimators": [50, 100, 150],
            "learning_rate": [0.01, 0.1, 0.5, 1.0],
            "max_depth": [2, 4, 6, 8, 10],
        },
    }


def reduced_grids() -> dict[str, dict[str, list]]:
    """Shrunken grids for quick runs and CI."""
    return {
        "knn": {"neighbors": [5, 15, 35]},
        "tree": {"max_depth": [2, 4]},
        "random_forest": {"max_depth": [2, 4]},
        "adaboost": {"n_estimators": [50], "learning_rate": [0.1]},
        "gradient_boosting": {"n_estimators": [50], "learning_rate": [0.1], "max_depth": [2, 4]},
    }


@dataclass(frozen=True)
class ModelSpec:
    """A model family with concrete hyperparameters and a seed."""

    family: str
    hyperparameters: dict
    seed: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")


@dataclass
class GridSearchResult:
    best_spec: ModelSpec
    best_model: object
    scores: list[tuple[dict, float]]


def fit_model(family: str, params: dict, train: LabeledMatrix, seed: int = 0):
    """Construct and fit one model."""
    if family == "knn":
        return knn_fit(train, params["neighbors"])
    if family == "tree":
        return tree_fit(train, params["max_depth"])
    if family == "random_forest":
        return forest_fit(train, params["max_depth"], params.get("n_trees", 100), seed)
    if family == "adaboost":
        return adaboost_fit(train, params["n_estimators"], params["learning_rate"], seed)
    if family == "gradient_boosting":
        return gboost_fit(
            train, params["n_estimators"], params["learning_rate"], params["max_depth"], seed
        )
    raise ValueError(f"unknown model family {family!r}")


def stratified_fold_indices(labels: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Validation index arrays for seeded stratified folds.

    Indices of each label are shuffled (one RNG, labels in ascending order)
    and dealt round-robin, so every label appears in every fold; labels rarer
    than the fold count are an error.
    """
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    labels = np.asarray(labels)
    rng = random.Random(seed)
    assignment = np.empty(labels.shape[0], dtype=np.int64)
    for value in sorted(np.unique(labels).tolist()):
        idx = np.nonzero(labels == value)[0].tolist()
        if len(idx) < folds:
            raise ValueError(f"label {value!r} has {len(idx)} rows; need >= {folds} for {folds} folds")
        rng.shuffle(idx)
        for position, row in enumerate(idx):
            assignment[row] = position % folds
    return [np.nonzero(assignment == f)[0] for f in range(folds)]


def _subset(matrix: LabeledMatrix, idx: np.ndarray) -> LabeledMatrix:
    return LabeledMatrix(matrix.features[idx], matrix.labels[idx], matrix.feature_names)


def _accuracy(labels: np.ndarray, scores: np.ndarray) -> float:
    return float(np.mean((scores >= 0.5).astype(np.int64) == labels))


def _grid_points(grid: dict[str, Sequence]) -> list[dict]:
    names = sorted(grid)
    if not names or any(len(grid[n]) == 0 for n in names):
        raise ValueError("hyperparameter grid is empty")
    return [dict(zip(names, combo)) for combo in itertools.product(*(grid[n] for n in names))]


def _staged_param(family: str) -> str | None:
    if family == "knn":
        return "neighbors"
    if family in ("adaboost", "gradient_boosting"):
        return "n_estimators"
    return None


def _fold_accuracies(
    family: str,
    points: list[dict],
    train: LabeledMatrix,
    fit: LabeledMatrix,
    val: LabeledMatrix,
    seed: int,
) -> dict[int, float]:
    """Validation accuracy per grid-point index for one fold."""
    out: dict[int, float] = {}
    staged = _staged_param(family)
    if staged is None:
        for i, params in enumerate(points):
            model = fit_model(family, params, fit, seed)
            out[i] = _accuracy(val.labels, model.predict_score(val.features))
        return out
    # group points sharing every non-staged parameter; one fit per group
    groups: dict[tuple, list[int]] = {}
    for i, params in enumerate(points):
        key = tuple(sorted((k, v) for k, v in params.items() if k != staged))
        groups.setdefault(key, []).append(i)
    for indices in groups.values():
        stage_values = [points[i][staged] for i in indices]
        if family == "knn":
            counts = [v for v in stage_values]
            scores = neighbor_scores(fit.features, fit.labels, val.features, counts)
            for i, v in zip(indices, stage_values):
                out[i] = _accuracy(val.labels, scores[v])
            continue
        largest = dict(points[indices[stage_values.index(max(stage_values))]])
        model = fit_model(family, largest, fit, seed)
        wanted = {v: i for i, v in zip(indices, stage_values)}
        stages = (
            model.staged_scores(val.features)
            if family == "gradient_boosting"
            else model.staged_margins(val.features)
        )
        last = None
        stage_no = 0
        for stage_no, raw in enumerate(stages, start=1):
            scores = raw if family == "gradient_boosting" else (raw >= 0).astype(float)
            last = scores
            if stage_no in wanted:
                out[wanted[stage_no]] = _accuracy(val.labels, scores)
        for v, i in wanted.items():
            # early-stopped fits cover every larger stage count with the final state
            if i not in out:
                if last is None:
                    last = np.full(val.labels.shape[0], 0.5)
                out[i] = _accuracy(val.labels, last)
    return out


def grid_search_cv(
    family: str,
    grid: dict[str, Sequence],
    train: LabeledMatrix,
    folds: int = 5,
    seed: int = 0,
) -> GridSearchResult:
    """Pick the grid point with the best mean validation accuracy and retrain it
    on the full training split."""
    points = _grid_points(grid)
    fold_idx = stratified_fold_indices(train.labels, folds, seed)
    all_rows = np.arange(train.labels.shape[0])
    sums = np.zeros(len(points))
    for val_rows in fold_idx:
        mask = np.ones(all_rows.shape[0], dtype=bool)
        mask[val_rows] = False
        fit = _subset(train, all_rows[mask])
        val = _subset(train, val_rows)
        fold_acc = _fold_accuracies(family, points, train, fit, val, seed)
        for i, acc in fold_acc.items():
            sums[i] += acc
    means = sums / len(fold_idx)
    best = 0
    for i in range(1, len(points)):
        if means[i] > means[best]:
            best = i
    best_spec = ModelSpec(family, dict(points[best]), seed)
    best_model = fit_model(family, points[best], train, seed)
    return GridSearchResult(best_spec, best_model, [(p, float(a)) for p, a in zip(points, means)])
