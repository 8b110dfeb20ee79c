"""End-to-end pipeline on the public census income sample (if present).

Fetch the data first (needs network):  python scripts/prepare_adult.py
Then run from the repository root:     python demos/05_census_pipeline.py

Equivalent CLI:
  tabanon anonymize --data data/adult.csv --schema data/adult_schema.csv \
      --hierarchies data/hierarchies --k 5 --out out/k5
  tabanon evaluate out/k5/anonymized.csv --data data/adult.csv \
      --schema data/adult_schema.csv --models gb --reduced-grid --out out/k5
"""

import sys
import time
from pathlib import Path

import numpy as np

from tabanon import (
    PrivacyRequirement,
    SearchConfig,
    anonymize,
    avg_class_size_metric,
    hierarchies_for_dataset,
    load_dataset,
    load_schema,
    roc_auc,
    split_stratified,
)
from tabanon.ml import encode, fit_encoder, grid_search_cv, reduced_grids

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data" / "adult.csv"

if not DATA.exists():
    sys.exit("data/adult.csv not found; run scripts/prepare_adult.py first (needs network)")

table = load_dataset(DATA, load_schema(ROOT / "data" / "adult_schema.csv"))
print(f"loaded {table.row_count} census rows")
hierarchies = hierarchies_for_dataset(table, ROOT / "data" / "hierarchies")

start = time.perf_counter()
result = anonymize(table, hierarchies, SearchConfig(PrivacyRequirement(k=5), 1.0))
print(f"k=5 anonymization in {time.perf_counter() - start:.1f}s: node {result.node}, "
      f"{result.suppressed_count} rows suppressed, {result.audit.class_count} classes")
print("audit:", result.audit.as_report())
print(f"average class size metric: "
      f"{avg_class_size_metric(result.audit.record_count, 5, result.audit.class_count):.2f}")

pair = split_stratified(result.output, 0.75, seed=0)
encoder = fit_encoder(pair.train)
train = encode(encoder, pair.train)
test = encode(encoder, pair.test)
search = grid_search_cv("gradient_boosting", reduced_grids()["gradient_boosting"], train, seed=0)
scores = search.best_model.predict_score(test.features)
accuracy = float(np.mean((scores >= 0.5).astype(int) == test.labels))
print(f"\ngradient boosting on the released table: accuracy {accuracy:.4f}, "
      f"AUC {roc_auc(test.labels, scores).auc:.4f} (reduced grid, {search.best_spec.hyperparameters})")
