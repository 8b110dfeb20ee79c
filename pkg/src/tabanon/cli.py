"""Command-line pipeline: anonymize, audit, metrics, evaluate, sweep-k,
sweep-techniques.

Reports are JSON with sorted keys and no timestamps, so a command re-run with
the same configuration and seeds produces byte-identical files. ROC curves are
written as two-column ``fpr,tpr`` CSV for external plotting.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .anonymizer import (
    AnonymizationResult,
    SearchConfig,
    UnsatisfiableRequirementError,
    anonymize,
)
from .data import Dataset, drop_identifiers, load_dataset, load_schema, serialize_dataset, split_stratified
from .hierarchy import hierarchies_for_dataset, validate_hierarchy
from .metrics import (
    EvalReport,
    avg_class_size_metric,
    classification_metric,
    roc_auc,
    accuracy as accuracy_of,
)
from .ml import default_grids, encode, fit_encoder, grid_search_cv, reduced_grids
from .partition import Partition, partition_classes
from .privacy import PrivacyRequirement, audit
from . import __version__

MODEL_ALIASES = {"rf": "random_forest", "ab": "adaboost", "gb": "gradient_boosting"}
DEFAULT_MODELS = "knn,random_forest,adaboost,gradient_boosting"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a pipeline run needs: inputs, requirement, split and grids.

    The grids default to the full hyperparameter lists of the evaluation
    harness; ``reduced_grid`` swaps in the small ones.
    """

    data: str
    schema: str
    out: str
    hierarchies: str | None = None
    k: int = 5
    l: int | None = None
    t: float | None = None
    delta: float | None = None
    suppression_limit: float = 1.0
    split: float = 0.75
    seed: int = 0
    models: tuple[str, ...] = tuple(DEFAULT_MODELS.split(","))
    reduced_grid: bool = False

    @classmethod
    def from_args(cls, args) -> "PipelineConfig":
        fields = {
            name: getattr(args, name)
            for name in ("data", "schema", "out", "hierarchies", "k", "l", "t",
                         "delta", "suppression_limit", "split", "seed", "reduced_grid")
            if hasattr(args, name)
        }
        if hasattr(args, "models"):
            fields["models"] = tuple(_families(args.models))
        return cls(**fields)

    def requirement(self) -> PrivacyRequirement:
        return PrivacyRequirement(k=self.k, l=self.l, t=self.t, delta=self.delta)

    def grids(self) -> dict:
        return reduced_grids() if self.reduced_grid else default_grids()


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_table(dataset: Dataset, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    serialize_dataset(dataset, path)


def _load_table(path: str, schema_path: str) -> Dataset:
    """Load a table whose header may be a subset of the schema file's attributes
    (anonymized outputs have no identifier columns)."""
    schema = load_schema(schema_path)
    with open(path, encoding="utf-8", newline="") as stream:
        header = {c.strip() for c in next(csv.reader(stream), [])}
    subset = tuple(a for a in schema if a.name in header)
    return load_dataset(path, subset)


def _families(requested: str) -> list[str]:
    names = []
    for token in requested.split(","):
        token = token.strip()
        if not token:
            continue
        names.append(MODEL_ALIASES.get(token, token))
    if not names:
        raise ValueError("no model families requested")
    return names


def _partition_with_suppressed(table: Dataset, suppressed: int, original: int) -> Partition:
    """Partition of a released table with suppressed rows re-attached as
    synthetic trailing indices, for penalty-based metrics."""
    p = partition_classes(table)
    extra = tuple(range(table.row_count, table.row_count + suppressed))
    return Partition(p.classes, extra, original)


def _run_anonymize(dataset: Dataset, hierarchies, requirement, limit) -> AnonymizationResult:
    for name, h in hierarchies.items():
        uncovered = validate_hierarchy(h, dataset, name)
        if uncovered:
            raise ValueError(
                f"hierarchy for {name!r} does not cover values: {uncovered[:10]}"
            )
    return anonymize(dataset, hierarchies, SearchConfig(requirement, limit))


def _anonymize_report(result: AnonymizationResult, requirement, limit) -> dict:
    return {
        "node": list(result.node),
        "suppressed": result.suppressed_count,
        "normalized_level_sum": float(result.cost[0]),
        "avg_class_size": avg_class_size_metric(
            result.audit.record_count, requirement.k, result.audit.class_count
        ),
        "audit": result.audit.as_report(),
        "requirement": {
            "k": requirement.k,
            "l": requirement.l,
            "t": requirement.t,
            "delta": requirement.delta,
        },
        "suppression_limit": limit,
    }


def _evaluate_table(
    table: Dataset,
    original_count: int,
    suppressed: int,
    families: list[str],
    grids: dict,
    split_fraction: float,
    seed: int,
    out_dir: Path,
) -> dict:
    """Split, grid-search, retrain and test each family; write per-family reports."""
    labels = set(table.column(table.sensitive_attribute().name))
    if len(labels) < 2:
        raise ValueError(f"table has a single label value {labels}; cannot evaluate")
    pair = split_stratified(table, split_fraction, seed)
    encoder = fit_encoder(pair.train)
    train = encode(encoder, pair.train)
    test = encode(encoder, pair.test)
    cm = classification_metric(
        original_count, _partition_with_suppressed(table, suppressed, original_count)
    )
    summary: dict = {
        "records": table.row_count,
        "original_count": original_count,
        "suppressed": suppressed,
        "cm": cm,
        "split": split_fraction,
        "seed": seed,
        "positive_label": encoder.positive_label,
        "models": {},
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    for family in families:
        search = grid_search_cv(family, grids[family], train, folds=5, seed=seed)
        scores = search.best_model.predict_score(test.features)
        predictions = (scores >= 0.5).astype(int)
        roc = roc_auc(test.labels, scores)
        result = EvalReport(
            accuracy=accuracy_of(test.labels, predictions),
            auc=roc.auc,
            roc_points=roc.points,
            positives=roc.positives,
            negatives=roc.negatives,
        )
        _write_json(out_dir / f"eval_{family}.json", {
            "family": family,
            "best_params": search.best_spec.hyperparameters,
            "cv_accuracy": max(a for _, a in search.scores),
            "accuracy": result.accuracy,
            "auc": result.auc,
            "positives": result.positives,
            "negatives": result.negatives,
        })
        with open(out_dir / f"roc_{family}.csv", "w", encoding="utf-8") as stream:
            stream.write("fpr,tpr\n")
            for fpr, tpr in result.roc_points:
                stream.write(f"{fpr!r},{tpr!r}\n")
        summary["models"][family] = {"accuracy": result.accuracy, "auc": result.auc,
                                     "best_params": search.best_spec.hyperparameters}
    _write_json(out_dir / "evaluation.json", summary)
    return summary


def cmd_anonymize(args) -> int:
    cfg = PipelineConfig.from_args(args)
    dataset = drop_identifiers(load_dataset(cfg.data, load_schema(cfg.schema)))
    hierarchies = hierarchies_for_dataset(dataset, cfg.hierarchies)
    requirement = cfg.requirement()
    out = Path(cfg.out)
    try:
        result = _run_anonymize(dataset, hierarchies, requirement, cfg.suppression_limit)
    except UnsatisfiableRequirementError as exc:
        report = {
            "error": str(exc),
            "best_node": list(exc.best_node) if exc.best_node is not None else None,
            "best_audit": exc.best_audit.as_report() if exc.best_audit is not None else None,
        }
        _write_json(out / "summary.json", report)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_table(result.output, out / "anonymized.csv")
    _write_json(out / "audit.json", result.audit.as_report())
    _write_json(out / "summary.json", _anonymize_report(result, requirement, cfg.suppression_limit))
    print(f"node {list(result.node)}, suppressed {result.suppressed_count}, "
          f"released {result.output.row_count} rows -> {out}")
    return 0


def cmd_audit(args) -> int:
    table = _load_table(args.table, args.schema)
    report = audit(table, args.suppressed_count).as_report()
    _write_json(Path(args.out) / "audit.json", report)
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_metrics(args) -> int:
    table = _load_table(args.table, args.schema)
    original = args.original_count if args.original_count else table.row_count
    suppressed = original - table.row_count
    if suppressed < 0:
        raise ValueError("original count is smaller than the released table")
    partition = partition_classes(table)
    report = {
        "k": args.k,
        "classes": len(partition.classes),
        "records": table.row_count,
        "original_count": original,
        "suppressed": suppressed,
        "avg_class_size": avg_class_size_metric(table.row_count, args.k, len(partition.classes)),
        "cm": classification_metric(
            original, _partition_with_suppressed(table, suppressed, original)
        ),
    }
    _write_json(Path(args.out) / "metrics.json", report)
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_evaluate(args) -> int:
    cfg = PipelineConfig.from_args(args)
    if args.table is not None:
        table = _load_table(args.table, cfg.schema)
        original = load_dataset(cfg.data, load_schema(cfg.schema)).row_count
    else:
        table = drop_identifiers(load_dataset(cfg.data, load_schema(cfg.schema)))
        original = table.row_count
    _evaluate_table(
        table,
        original,
        original - table.row_count,
        list(cfg.models),
        cfg.grids(),
        cfg.split,
        cfg.seed,
        Path(cfg.out),
    )
    print(f"evaluation written to {cfg.out}")
    return 0


def cmd_sweep_k(args) -> int:
    ks = [int(token) for token in str(args.k).split(",")]
    cfg = PipelineConfig.from_args(args)
    dataset = drop_identifiers(load_dataset(cfg.data, load_schema(cfg.schema)))
    hierarchies = hierarchies_for_dataset(dataset, cfg.hierarchies)
    grids = cfg.grids()
    families = list(cfg.models)
    out = Path(cfg.out)
    rows = []
    for k in ks:
        sub = out / f"k_{k}"
        requirement = PrivacyRequirement(k=k)
        result = _run_anonymize(dataset, hierarchies, requirement, cfg.suppression_limit)
        _write_table(result.output, sub / "anonymized.csv")
        _write_json(sub / "audit.json", result.audit.as_report())
        _write_json(sub / "summary.json",
                    _anonymize_report(result, requirement, cfg.suppression_limit))
        summary = _evaluate_table(
            result.output, dataset.row_count, result.suppressed_count,
            families, grids, cfg.split, cfg.seed, sub,
        )
        rows.append({
            "k": k,
            "node": list(result.node),
            "suppressed": result.suppressed_count,
            "avg_class_size": avg_class_size_metric(
                result.audit.record_count, k, result.audit.class_count
            ),
            "cm": summary["cm"],
            "models": summary["models"],
        })
    _write_json(out / "sweep_k.json", {"k_values": ks, "rows": rows})
    print(f"swept k over {ks} -> {out}")
    return 0


def cmd_sweep_techniques(args) -> int:
    cfg = PipelineConfig.from_args(args)
    dataset = drop_identifiers(load_dataset(cfg.data, load_schema(cfg.schema)))
    hierarchies = hierarchies_for_dataset(dataset, cfg.hierarchies)
    grids = cfg.grids()
    families = list(cfg.models)
    configs = [
        ("raw", None),
        ("k", PrivacyRequirement(k=cfg.k)),
        ("k_l", PrivacyRequirement(k=cfg.k, l=cfg.l)),
        ("k_t", PrivacyRequirement(k=cfg.k, t=cfg.t)),
        ("k_delta", PrivacyRequirement(k=cfg.k, delta=cfg.delta)),
    ]
    out = Path(cfg.out)
    rows = []
    for name, requirement in configs:
        sub = out / name
        if requirement is None:
            table, suppressed = dataset, 0
            row: dict = {"config": name, "requirement": None}
        else:
            result = _run_anonymize(dataset, hierarchies, requirement, cfg.suppression_limit)
            _write_table(result.output, sub / "anonymized.csv")
            _write_json(sub / "audit.json", result.audit.as_report())
            _write_json(sub / "summary.json",
                        _anonymize_report(result, requirement, cfg.suppression_limit))
            table, suppressed = result.output, result.suppressed_count
            row = {
                "config": name,
                "requirement": {"k": requirement.k, "l": requirement.l,
                                "t": requirement.t, "delta": requirement.delta},
                "node": list(result.node),
                "audit": result.audit.as_report(),
            }
        summary = _evaluate_table(
            table, dataset.row_count, suppressed, families, grids, cfg.split, cfg.seed, sub,
        )
        row.update({"cm": summary["cm"], "suppressed": suppressed, "models": summary["models"]})
        rows.append(row)
    _write_json(out / "sweep_techniques.json", {"rows": rows})
    print(f"swept techniques -> {out}")
    return 0


def _add_common(parser: argparse.ArgumentParser, *, data: bool = True) -> None:
    if data:
        parser.add_argument("--data", required=True, help="dataset CSV path")
    parser.add_argument("--schema", required=True, help="schema CSV path (name,role,kind)")
    parser.add_argument("--out", required=True, help="output directory")


def _add_eval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--split", type=float, default=0.75, help="train fraction")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--models", default=DEFAULT_MODELS,
                        help="comma-separated families (knn, tree, random_forest/rf, "
                             "adaboost/ab, gradient_boosting/gb)")
    parser.add_argument("--reduced-grid", action="store_true",
                        help="use the small hyperparameter grids")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabanon",
        description="Anonymize tabular data over generalization hierarchies and "
                    "measure the privacy/utility trade-off.",
    )
    parser.add_argument("--version", action="version", version=f"tabanon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("anonymize", help="search the lattice and release a table")
    _add_common(p)
    p.add_argument("--hierarchies", required=True, help="directory of <attribute>.csv files")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--suppression-limit", type=float, default=1.0)
    p.set_defaults(func=cmd_anonymize)

    p = sub.add_parser("audit", help="measure achieved guarantees of a table")
    p.add_argument("table", help="table CSV to audit")
    _add_common(p, data=False)
    p.add_argument("--suppressed-count", type=int, default=0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("metrics", help="utility metrics of a released table")
    p.add_argument("table", help="released table CSV")
    _add_common(p, data=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--original-count", type=int, default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("evaluate", help="train/test classifiers on a table")
    p.add_argument("table", nargs="?", default=None,
                   help="table to evaluate (default: the --data table)")
    _add_common(p)
    _add_eval_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep-k", help="anonymize and evaluate for several k values")
    _add_common(p)
    p.add_argument("--hierarchies", required=True)
    p.add_argument("--k", default="2,5,10,25,50,75,100", help="comma-separated k values")
    p.add_argument("--suppression-limit", type=float, default=1.0)
    _add_eval_flags(p)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("sweep-techniques",
                       help="compare raw, k, k+l, k+t and k+delta configurations")
    _add_common(p)
    p.add_argument("--hierarchies", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--t", type=float, default=0.7)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--suppression-limit", type=float, default=1.0)
    _add_eval_flags(p)
    p.set_defaults(func=cmd_sweep_techniques)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())
