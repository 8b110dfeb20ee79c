"""Equivalence-class partitioning of a table on its quasi-identifier tuple."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .data import Dataset
from .hierarchy import GeneralizationVector, Hierarchy, generalize_value


@dataclass(frozen=True)
class EquivalenceClass:
    """Rows identical on the (generalized) quasi-identifiers.

    ``members`` are row indices into the source dataset; ``sa_counts`` tallies
    the sensitive values among them.
    """

    signature: tuple[str, ...]
    members: tuple[int, ...]
    sa_counts: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Partition:
    """Equivalence classes plus suppressed row indices, covering a source table."""

    classes: tuple[EquivalenceClass, ...]
    suppressed: tuple[int, ...]
    source_count: int


def apply_generalization(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    node: GeneralizationVector,
) -> Dataset:
    """Replace each quasi-identifier cell by its level-``node[i]`` generalization.

    Sensitive and insensitive columns are untouched; row order is preserved.
    A quasi-identifier missing from ``hierarchies`` is allowed only at level 0
    (implicit identity hierarchy).
    """
    qis = dataset.quasi_identifiers()
    if len(node) != len(qis):
        raise ValueError(f"node has {len(node)} levels but dataset has {len(qis)} quasi-identifiers")
    columns: dict[int, list[str]] = {}
    for level, attr in zip(node, qis):
        j = dataset.index_of(attr.name)
        h = hierarchies.get(attr.name)
        if h is None:
            if level != 0:
                raise ValueError(f"no hierarchy for attribute {attr.name!r} (level {level} requested)")
            continue
        if level == 0:
            continue
        # one lookup per distinct value, then a column rewrite
        col = dataset.column(attr.name)
        mapping = {v: generalize_value(h, v, level) for v in set(col)}
        columns[j] = [mapping[v] for v in col]
    if not columns:
        return dataset
    rows = []
    for i, row in enumerate(dataset.rows):
        cells = list(row)
        for j, col in columns.items():
            cells[j] = col[i]
        rows.append(tuple(cells))
    return Dataset(dataset.schema, tuple(rows))


def partition_classes(dataset: Dataset) -> Partition:
    """Group rows by exact quasi-identifier tuple equality.

    Classes are ordered by ascending signature; members keep row order. The
    suppressed list starts empty.
    """
    qis = dataset.quasi_identifiers()
    if not qis:
        raise ValueError("dataset has no quasi-identifier attributes")
    qi_idx = [dataset.index_of(a.name) for a in qis]
    sa_idx = dataset.index_of(dataset.sensitive_attribute().name)
    groups: dict[tuple[str, ...], list[int]] = {}
    for i, row in enumerate(dataset.rows):
        groups.setdefault(tuple(row[j] for j in qi_idx), []).append(i)
    classes = []
    for signature in sorted(groups):
        members = groups[signature]
        counts: dict[str, int] = {}
        for i in members:
            value = dataset.rows[i][sa_idx]
            counts[value] = counts.get(value, 0) + 1
        classes.append(
            EquivalenceClass(signature, tuple(members), dict(sorted(counts.items())))
        )
    return Partition(tuple(classes), (), dataset.row_count)


def suppress_small_classes(partition: Partition, k: int) -> Partition:
    """Remove every class smaller than ``k`` and mark its members suppressed."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    kept = []
    suppressed = list(partition.suppressed)
    for ec in partition.classes:
        if ec.size < k:
            suppressed.extend(ec.members)
        else:
            kept.append(ec)
    return Partition(tuple(kept), tuple(suppressed), partition.source_count)


def check_partition(partition: Partition) -> None:
    """Validate coverage and disjointness; raises ValueError on violation."""
    seen: set[int] = set()
    total = 0
    for ec in partition.classes:
        if not ec.members:
            raise ValueError("equivalence class with no members")
        if sum(ec.sa_counts.values()) != ec.size:
            raise ValueError(f"class {ec.signature}: sa_counts do not sum to member count")
        total += ec.size
        overlap = seen.intersection(ec.members)
        if overlap:
            raise ValueError(f"row indices {sorted(overlap)} appear in multiple classes")
        seen.update(ec.members)
    overlap = seen.intersection(partition.suppressed)
    if overlap:
        raise ValueError(f"row indices {sorted(overlap)} both classed and suppressed")
    seen.update(partition.suppressed)
    total += len(partition.suppressed)
    if total != partition.source_count or seen != set(range(partition.source_count)):
        raise ValueError("partition does not cover exactly the source rows")
    signatures = [ec.signature for ec in partition.classes]
    if len(set(signatures)) != len(signatures):
        raise ValueError("duplicate class signatures")
