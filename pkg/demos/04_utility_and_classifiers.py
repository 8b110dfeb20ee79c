"""Utility metrics and the from-scratch classifier harness on synthetic data.

Run from the repository root:  python demos/04_utility_and_classifiers.py
"""

import numpy as np

from tabanon import (
    avg_class_size_metric,
    classification_metric,
    partition_classes,
    roc_auc,
    split_stratified,
)
from tabanon.ml import encode, fit_encoder, grid_search_cv, reduced_grids

from_demo_rows = []
rng = np.random.default_rng(7)
for i in range(400):
    region = rng.choice(["north", "south", "east", "west"])
    band = rng.choice(["young", "mid", "old"])
    chance = 0.75 if (region in ("north", "east")) == (band != "old") else 0.2
    label = "yes" if rng.random() < chance else "no"
    from_demo_rows.append((region, band, label))

from tabanon import AttributeSchema, Dataset  # noqa: E402

schema = (
    AttributeSchema("region", "quasi_identifier"),
    AttributeSchema("band", "quasi_identifier"),
    AttributeSchema("subscribed", "sensitive"),
)
table = Dataset(schema, tuple(from_demo_rows))

partition = partition_classes(table)
print(f"{len(partition.classes)} equivalence classes over {table.row_count} rows")
k = min(ec.size for ec in partition.classes)
print(f"average class size metric at k={k}: "
      f"{avg_class_size_metric(table.row_count, k, len(partition.classes)):.3f} (1.0 is optimal)")
print(f"classification metric (penalty fraction): "
      f"{classification_metric(table.row_count, partition):.3f}")

pair = split_stratified(table, 0.75, seed=0)
encoder = fit_encoder(pair.train)
train = encode(encoder, pair.train)
test = encode(encoder, pair.test)
print(f"\nencoded {train.m} one-hot features; positive label {encoder.positive_label!r}")

for family in ("knn", "tree", "random_forest", "adaboost", "gradient_boosting"):
    search = grid_search_cv(family, reduced_grids()[family], train, folds=5, seed=0)
    scores = search.best_model.predict_score(test.features)
    acc = float(np.mean((scores >= 0.5).astype(int) == test.labels))
    roc = roc_auc(test.labels, scores)
    print(f"{family:18s} best {search.best_spec.hyperparameters}  "
          f"accuracy {acc:.3f}  AUC {roc.auc:.3f}")
