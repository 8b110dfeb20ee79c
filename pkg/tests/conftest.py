"""Shared test helpers: independent oracles and randomized corpus builders.

The oracles reimplement the audited quantities from first principles (pure
Python, exact rational arithmetic where possible) and stay independent of the
library code paths they check.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from tabanon import AttributeSchema, Dataset, Hierarchy

REPO = Path(__file__).resolve().parent.parent
HIERARCHY_DIR = REPO / "data" / "hierarchies"
ADULT_SCHEMA = REPO / "data" / "adult_schema.csv"
ADULT_CSV = REPO / "data" / "adult.csv"

requires_adult = pytest.mark.skipif(
    not ADULT_CSV.exists(),
    reason="census sample not present; run scripts/prepare_adult.py (needs network) "
    "to place data/adult.csv",
)


def make_dataset(rows, n_qi=None, kinds=None, label_name="label"):
    """Dataset from row tuples whose last cell is the sensitive label."""
    rows = [tuple(str(c) for c in row) for row in rows]
    width = len(rows[0])
    if n_qi is None:
        n_qi = width - 1
    kinds = kinds or ["categorical"] * n_qi
    schema = [AttributeSchema(f"q{i}", "quasi_identifier", kinds[i]) for i in range(n_qi)]
    schema += [AttributeSchema(f"x{i}", "insensitive") for i in range(width - 1 - n_qi)]
    schema.append(AttributeSchema(label_name, "sensitive"))
    return Dataset(tuple(schema), tuple(rows))


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def oracle_audit(dataset: Dataset) -> dict:
    """Brute-force recomputation of achieved k / l / t / delta."""
    qi_idx = [i for i, a in enumerate(dataset.schema) if a.role == "quasi_identifier"]
    sa_idx = next(i for i, a in enumerate(dataset.schema) if a.role == "sensitive")
    kind = dataset.schema[sa_idx].kind
    groups: dict[tuple, list[str]] = {}
    for row in dataset.rows:
        groups.setdefault(tuple(row[j] for j in qi_idx), []).append(row[sa_idx])
    values = sorted({v for g in groups.values() for v in g},
                    key=(int if kind == "numeric_ordinal" else str))
    total = sum(len(g) for g in groups.values())
    global_mass = {v: Fraction(sum(g.count(v) for g in groups.values()), total) for v in values}

    k = min(len(g) for g in groups.values())
    l = min(len(set(g)) for g in groups.values())
    t_best = Fraction(0)
    delta_best = 0.0
    for g in groups.values():
        mass = {v: Fraction(g.count(v), len(g)) for v in values}
        if kind == "numeric_ordinal" and len(values) >= 2:
            cum = Fraction(0)
            acc = Fraction(0)
            for v in values:
                cum += mass[v] - global_mass[v]
                acc += abs(cum)
            distance = acc / (len(values) - 1)
        else:
            distance = sum(abs(mass[v] - global_mass[v]) for v in values) / 2
        t_best = max(t_best, distance)
        for v in values:
            if mass[v] > 0:
                delta_best = max(delta_best, abs(math.log(float(mass[v]) / float(global_mass[v]))))
    return {
        "k": k,
        "l": l,
        "t": float(t_best),
        "delta": delta_best,
        "classes": len(groups),
        "records": total,
    }


def concordance_auc(labels, scores) -> float:
    """Pairwise concordance statistic: P(score+ > score-) + 0.5 P(equal)."""
    pos = [s for y, s in zip(labels, scores) if y == 1]
    neg = [s for y, s in zip(labels, scores) if y == 0]
    acc = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                acc += 1.0
            elif p == q:
                acc += 0.5
    return acc / (len(pos) * len(neg))


# ---------------------------------------------------------------------------
# randomized corpus
# ---------------------------------------------------------------------------

def random_hierarchy(rng: random.Random, attr: str, raw_values: list[str], height: int) -> Hierarchy:
    """Random chain of coarsenings (monotone by construction)."""
    paths = {v: [v] for v in raw_values}
    current = {v: v for v in raw_values}
    for level in range(1, height + 1):
        prev_groups = sorted(set(current.values()))
        n_groups = 1 if level == height and rng.random() < 0.5 else max(1, (len(prev_groups) + 1) // 2)
        names = [f"{attr}.L{level}g{i}" for i in range(n_groups)]
        if n_groups == 1 and rng.random() < 0.5:
            names = ["*"]
        mapping = {g: rng.choice(names) for g in prev_groups}
        for v in raw_values:
            current[v] = mapping[current[v]]
            paths[v].append(current[v])
    return Hierarchy(attr, height, {v: tuple(p) for v, p in paths.items()})


def random_dataset(rng: random.Random, max_rows: int = 200, max_qis: int = 3):
    """Random small table with binary sensitive labels plus matching hierarchies."""
    n_qi = rng.randint(1, max_qis)
    hierarchies = {}
    vocab = []
    kinds = []
    for i in range(n_qi):
        raw = [f"q{i}v{j}" for j in range(rng.randint(2, 6))]
        hierarchies[f"q{i}"] = random_hierarchy(rng, f"q{i}", raw, rng.randint(0, 3))
        vocab.append(raw)
        kinds.append("categorical")
    n_rows = rng.randint(4, max_rows)
    rows = [
        tuple(rng.choice(vocab[i]) for i in range(n_qi)) + (rng.choice(["A", "B"]),)
        for _ in range(n_rows)
    ]
    return make_dataset(rows, n_qi=n_qi, kinds=kinds), hierarchies


def exhaustive_optimum(dataset, hierarchies, config):
    """Oracle: evaluate every lattice node and pick the cost-order minimum.

    Returns (node, suppressed) or None when nothing satisfies.
    """
    from fractions import Fraction as F

    from tabanon import evaluate_node, lattice_nodes

    qis = dataset.quasi_identifiers()
    heights = [hierarchies[a.name].height for a in qis]
    best = None
    for node in lattice_nodes(heights):
        ok, suppressed, _ = evaluate_node(dataset, hierarchies, node, config)
        if not ok:
            continue
        cost = sum((F(l, h) for l, h in zip(node, heights) if h > 0), F(0))
        key = (cost, suppressed, node)
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return best[2], best[1]


def random_requirement(rng: random.Random):
    from tabanon import PrivacyRequirement

    return PrivacyRequirement(
        k=rng.randint(1, 10),
        l=2 if rng.random() < 0.4 else None,
        t=rng.choice([0.3, 0.5, 0.7]) if rng.random() < 0.4 else None,
        delta=rng.choice([1.0, 1.5, 3.0]) if rng.random() < 0.4 else None,
    )


def separable_toy_matrix():
    """Fixed linearly separable 40-row, 2-feature matrix (wide margin)."""
    rng = np.random.default_rng(12345)
    low = rng.uniform(0.0, 1.0, size=(20, 2))
    high = rng.uniform(10.0, 11.0, size=(20, 2))
    features = np.vstack([low, high])
    labels = np.array([0] * 20 + [1] * 20, dtype=np.int64)
    from tabanon.ml import LabeledMatrix

    return LabeledMatrix(features, labels, ("f0", "f1"))


# ---------------------------------------------------------------------------
# on-disk toy project for CLI runs
# ---------------------------------------------------------------------------

TOY_SCHEMA_TEXT = "name,role,kind\ncity,quasi_identifier,categorical\ngrp,quasi_identifier,categorical\nbuy,sensitive,categorical\n"
CITY_HIERARCHY_TEXT = "c1;east;*\nc2;east;*\nc3;west;*\nc4;west;*\n"
GRP_HIERARCHY_TEXT = "p\nq\n"


def write_toy_project(root: Path, n_per_cell: int = 20, separable: bool = True) -> dict:
    """A deterministic table over (city, grp) cells with mixed labels.

    With ``separable=True`` the label is decided by the city's region, so every
    classifier can reach perfect test accuracy; otherwise each cell mixes
    labels 60/40, which keeps every privacy technique satisfiable at the raw
    node (classes of size n_per_cell, both labels everywhere).
    """
    root.mkdir(parents=True, exist_ok=True)
    rows = []
    rng = random.Random(99)
    for city in ["c1", "c2", "c3", "c4"]:
        for grp in ["p", "q"]:
            for i in range(n_per_cell):
                if separable:
                    label = "yes" if city in ("c1", "c2") else "no"
                else:
                    label = "yes" if i < round(n_per_cell * 0.6) else "no"
                rows.append((city, grp, label))
    rng.shuffle(rows)
    data = root / "toy.csv"
    data.write_text("city,grp,buy\n" + "\n".join(",".join(r) for r in rows) + "\n")
    schema = root / "schema.csv"
    schema.write_text(TOY_SCHEMA_TEXT)
    hier = root / "hierarchies"
    hier.mkdir(exist_ok=True)
    (hier / "city.csv").write_text(CITY_HIERARCHY_TEXT)
    (hier / "grp.csv").write_text(GRP_HIERARCHY_TEXT)
    return {"data": data, "schema": schema, "hierarchies": hier, "rows": rows}


def dir_snapshot(path: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(path)): p.read_bytes()
        for p in sorted(path.rglob("*"))
        if p.is_file()
    }
