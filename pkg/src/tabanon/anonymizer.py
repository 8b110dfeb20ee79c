"""Lattice search for a minimal-cost generalization satisfying a privacy requirement.

Cost order: (1) normalized level sum (levels divided by attribute height,
attributes with height 0 contribute nothing), (2) suppressed row count,
(3) lexicographic node order. The search walks strata of equal normalized
level sum bottom-up, evaluates every node of a stratum, and stops at the
first stratum containing a satisfying node, which makes the result equal to
exhaustive search under the cost order.

Node evaluation during the scan uses integer-coded signatures and per-class
count matrices but routes every accept/reject decision through the privacy
module's shared count-matrix kernels, so decisions match the public
evaluate_node path exactly; the winner is re-materialized through that path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .data import Dataset
from .hierarchy import GeneralizationVector, Hierarchy, generalize_value
from .partition import Partition, apply_generalization, partition_classes, suppress_small_classes
from .privacy import (
    PrivacyAudit,
    PrivacyRequirement,
    audit,
    max_delta_from_counts,
    max_t_from_counts,
    min_distinct_from_counts,
    ordered_support,
    satisfies,
)


@dataclass(frozen=True)
class SearchConfig:
    """Requirement to enforce plus the suppressible fraction of input rows."""

    requirement: PrivacyRequirement
    suppression_limit: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= self.suppression_limit <= 1:
            raise ValueError(f"suppression_limit must be in [0, 1], got {self.suppression_limit}")


@dataclass(frozen=True)
class AnonymizationResult:
    """Chosen lattice node, released table, suppression stats, and audit."""

    node: GeneralizationVector
    output: Dataset
    suppressed_count: int
    audit: PrivacyAudit
    cost: tuple[Fraction, int]


class UnsatisfiableRequirementError(ValueError):
    """No lattice node satisfies the requirement within the suppression budget."""

    def __init__(self, message: str, best_node: GeneralizationVector | None = None,
                 best_audit: PrivacyAudit | None = None):
        super().__init__(message)
        self.best_node = best_node
        self.best_audit = best_audit


def lattice_nodes(heights: Sequence[int]) -> list[GeneralizationVector]:
    """All level vectors, ordered by ascending level sum then lexicographically."""
    if any(h < 0 for h in heights):
        raise ValueError("heights must be non-negative")
    nodes = itertools.product(*(range(h + 1) for h in heights))
    return sorted(nodes, key=lambda node: (sum(node), node))


def normalized_level_sum(node: GeneralizationVector, heights: Sequence[int]) -> Fraction:
    """Exact rational sum of level/height over attributes with height > 0."""
    total = Fraction(0)
    for level, height in zip(node, heights):
        if height > 0:
            total += Fraction(level, height)
    return total


def evaluate_node(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    node: GeneralizationVector,
    config: SearchConfig,
) -> tuple[bool, int, Partition]:
    """Generalize, partition, suppress classes below k, then check the requirement.

    Returns (satisfies, suppressed row count, post-suppression partition).
    Satisfaction additionally requires the suppressed count to stay within
    the budget ``suppression_limit * row_count``.
    """
    generalized = apply_generalization(dataset, hierarchies, node)
    partition = suppress_small_classes(partition_classes(generalized), config.requirement.k)
    suppressed = len(partition.suppressed)
    kind = dataset.sensitive_attribute().kind
    ok = (
        suppressed <= config.suppression_limit * dataset.row_count
        and satisfies(partition, config.requirement, kind)
    )
    return ok, suppressed, partition


def _best_achievable_k(sizes: np.ndarray, budget: float) -> int:
    """Largest k reachable at a node by suppressing whole classes within budget."""
    if sizes.size == 0:
        return 0
    total = int(sizes.sum())
    best = 0
    for threshold in np.unique(sizes)[::-1]:
        dropped = total - int(sizes[sizes >= threshold].sum())
        if dropped <= budget:
            best = int(threshold)
            break
    return best


class _LatticeScanner:
    """Vectorized per-node evaluation over precomputed level code columns."""

    def __init__(self, dataset: Dataset, hierarchies: Mapping[str, Hierarchy]):
        self.dataset = dataset
        self.qis = dataset.quasi_identifiers()
        self.hierarchies = hierarchies
        kind = dataset.sensitive_attribute().kind
        self.kind = kind
        sa_col = dataset.column(dataset.sensitive_attribute().name)
        support = ordered_support(set(sa_col), kind)
        code = {v: i for i, v in enumerate(support)}
        self.n_labels = len(support)
        self.sa_codes = np.fromiter((code[v] for v in sa_col), dtype=np.int64, count=len(sa_col))
        self._columns: dict[tuple[str, int], tuple[np.ndarray, int]] = {}

    def _codes(self, attr: str, level: int) -> tuple[np.ndarray, int]:
        """Integer codes (ascending by generalized value) and code count."""
        key = (attr, level)
        cached = self._columns.get(key)
        if cached is not None:
            return cached
        raw = self.dataset.column(attr)
        h = self.hierarchies.get(attr)
        if level == 0 or h is None:
            col = raw
        else:
            mapping = {v: generalize_value(h, v, level) for v in set(raw)}
            col = [mapping[v] for v in raw]
        vocab = {v: i for i, v in enumerate(sorted(set(col)))}
        codes = np.fromiter((vocab[v] for v in col), dtype=np.int64, count=len(col))
        result = (codes, len(vocab))
        self._columns[key] = result
        return result

    def class_counts(self, node: GeneralizationVector) -> np.ndarray:
        """Per-class sensitive-value count matrix, classes in ascending signature order."""
        combined: np.ndarray | None = None
        bound = 1
        for attr, level in zip(self.qis, node):
            codes, width = self._codes(attr.name, level)
            if combined is None:
                combined, bound = codes, width
            else:
                if bound * width >= 2 ** 62:  # keep packed codes inside int64
                    _, combined = np.unique(combined, return_inverse=True)
                    bound = int(combined.max()) + 1 if combined.size else 1
                combined = combined * width + codes
                bound *= width
        assert combined is not None
        _, class_ids, counts = np.unique(combined, return_inverse=True, return_counts=True)
        matrix = np.bincount(
            class_ids * self.n_labels + self.sa_codes,
            minlength=counts.size * self.n_labels,
        ).reshape(counts.size, self.n_labels)
        return matrix

    def evaluate(
        self, node: GeneralizationVector, config: SearchConfig
    ) -> tuple[bool, int, int, int]:
        """(satisfies, suppressed count, satisfied parts, best k achievable in budget)."""
        counts = self.class_counts(node)
        sizes = counts.sum(axis=1)
        req = config.requirement
        small = sizes < req.k
        suppressed = int(sizes[small].sum())
        survivors = counts[~small]
        budget = config.suppression_limit * self.dataset.row_count
        best_k = _best_achievable_k(sizes, budget)
        if survivors.shape[0]:
            # match the public path's support: only labels present after suppression
            survivors = survivors[:, survivors.sum(axis=0) > 0]
        met = 0
        k_ok = survivors.shape[0] > 0 and suppressed <= budget
        met += k_ok
        parts = 1
        l_ok = t_ok = d_ok = True
        if req.l is not None:
            parts += 1
            l_ok = survivors.shape[0] > 0 and min_distinct_from_counts(survivors) >= req.l
            met += l_ok
        if req.t is not None:
            parts += 1
            t_ok = survivors.shape[0] > 0 and max_t_from_counts(survivors, self.kind) <= req.t
            met += t_ok
        if req.delta is not None:
            parts += 1
            d_ok = survivors.shape[0] > 0 and max_delta_from_counts(survivors) < req.delta
            met += d_ok
        return k_ok and l_ok and t_ok and d_ok, suppressed, met, best_k


def _materialize(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    node: GeneralizationVector,
    config: SearchConfig,
    cost: Fraction,
) -> AnonymizationResult | None:
    ok, suppressed, partition = evaluate_node(dataset, hierarchies, node, config)
    if not ok:
        return None
    generalized = apply_generalization(dataset, hierarchies, node)
    dropped = set(partition.suppressed)
    rows = tuple(row for i, row in enumerate(generalized.rows) if i not in dropped)
    output = Dataset(generalized.schema, rows)
    result_audit = audit(output, suppressed) if rows else None
    if result_audit is None:
        return None
    return AnonymizationResult(node, output, suppressed, result_audit, (cost, suppressed))


def anonymize(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    config: SearchConfig,
) -> AnonymizationResult:
    """Search the generalization lattice for the cheapest satisfying node.

    Raises UnsatisfiableRequirementError (carrying the closest-found node's
    audit) when no node satisfies the requirement within the budget.
    """
    qis = dataset.quasi_identifiers()
    if not qis:
        raise ValueError("dataset has no quasi-identifier attributes")
    if dataset.row_count == 0:
        raise ValueError("dataset has no rows")
    heights = [hierarchies[a.name].height if a.name in hierarchies else 0 for a in qis]
    nodes = lattice_nodes(heights)
    strata: dict[Fraction, list[GeneralizationVector]] = {}
    for node in nodes:
        strata.setdefault(normalized_level_sum(node, heights), []).append(node)

    scanner = _LatticeScanner(dataset, hierarchies)
    best_miss: tuple[int, int, Fraction, GeneralizationVector] | None = None
    for cost in sorted(strata):
        satisfying: list[tuple[int, GeneralizationVector]] = []
        for node in sorted(strata[cost]):
            ok, suppressed, met, best_k = scanner.evaluate(node, config)
            if ok:
                satisfying.append((suppressed, node))
            elif best_miss is None or (-met, -best_k, cost, node) < best_miss:
                best_miss = (-met, -best_k, cost, node)
        if satisfying:
            _, node = min(satisfying)
            result = _materialize(dataset, hierarchies, node, config, cost)
            if result is not None:
                return result
            # scan/materialize disagreement: fall back to the public path
            return _exhaustive(dataset, hierarchies, config, heights, nodes)
    best_node = best_audit = None
    if best_miss is not None:
        best_node = best_miss[3]
        _, _, partition = evaluate_node(dataset, hierarchies, best_node, config)
        generalized = apply_generalization(dataset, hierarchies, best_node)
        if partition.classes:
            dropped = set(partition.suppressed)
            rows = tuple(row for i, row in enumerate(generalized.rows) if i not in dropped)
            best_audit = audit(Dataset(generalized.schema, rows), len(partition.suppressed))
        else:
            # everything below k: report the pre-suppression state of that node
            best_audit = audit(generalized, 0)
    raise UnsatisfiableRequirementError(
        f"no generalization satisfies {config.requirement} "
        f"within suppression limit {config.suppression_limit}",
        best_node=best_node,
        best_audit=best_audit,
    )


def _exhaustive(
    dataset: Dataset,
    hierarchies: Mapping[str, Hierarchy],
    config: SearchConfig,
    heights: Sequence[int],
    nodes: Sequence[GeneralizationVector],
) -> AnonymizationResult:
    """Public-path evaluation of every node; safety net and oracle twin."""
    best: tuple[tuple[Fraction, int, GeneralizationVector], GeneralizationVector] | None = None
    for node in nodes:
        ok, suppressed, _ = evaluate_node(dataset, hierarchies, node, config)
        if not ok:
            continue
        key = (normalized_level_sum(node, heights), suppressed, node)
        if best is None or key < best[0]:
            best = (key, node)
    if best is None:
        raise UnsatisfiableRequirementError(
            f"no generalization satisfies {config.requirement} "
            f"within suppression limit {config.suppression_limit}"
        )
    result = _materialize(dataset, hierarchies, best[1], config, best[0][0])
    assert result is not None
    return result
