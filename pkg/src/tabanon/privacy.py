"""Privacy model checks over a partition: minimum class size, sensitive-value
diversity, distribution closeness, and the log-ratio disclosure bound.

All distribution arithmetic happens on per-class integer count matrices
normalized in float64 at the last step. The ``*_from_counts`` kernels are the
single computation path shared by the public auditing functions and the
anonymizer's lattice scan, so both always agree bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .partition import Partition, partition_classes

__all__ = [
    "PrivacyRequirement",
    "PrivacyAudit",
    "Distribution",
    "achieved_k",
    "achieved_l",
    "achieved_t",
    "achieved_delta",
    "dist_equal",
    "emd_ordered",
    "audit",
    "satisfies",
]


@dataclass(frozen=True)
class PrivacyRequirement:
    """Requested guarantees: k is mandatory, the rest optional."""

    k: int
    l: int | None = None
    t: float | None = None
    delta: float | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.l is not None and self.l < 1:
            raise ValueError(f"l must be >= 1, got {self.l}")
        if self.t is not None and not 0 <= self.t <= 1:
            raise ValueError(f"t must be in [0, 1], got {self.t}")
        if self.delta is not None and self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class PrivacyAudit:
    """Achieved guarantees of a released table, plus class/record counts."""

    achieved_k: int
    achieved_l: int
    achieved_t: float
    achieved_delta: float
    class_count: int
    record_count: int
    suppressed_count: int = 0

    def as_report(self) -> dict:
        return {
            "k": self.achieved_k,
            "l": self.achieved_l,
            "t": self.achieved_t,
            "delta": self.achieved_delta,
            "classes": self.class_count,
            "records": self.record_count,
            "suppressed": self.suppressed_count,
        }


@dataclass(frozen=True)
class Distribution:
    """Probability masses over an ordered support of sensitive values."""

    support: tuple[str, ...]
    mass: np.ndarray

    def __post_init__(self) -> None:
        mass = np.asarray(self.mass, dtype=float)
        object.__setattr__(self, "mass", mass)
        if len(self.support) != len(mass):
            raise ValueError("support and mass lengths differ")
        if np.any(mass < 0):
            raise ValueError("negative mass")
        if mass.size and abs(float(mass.sum()) - 1.0) > 1e-9:
            raise ValueError(f"mass sums to {float(mass.sum())}, not 1")

    @classmethod
    def from_counts(cls, counts: dict[str, int], kind: str = "categorical") -> "Distribution":
        support = ordered_support(counts.keys(), kind)
        arr = np.array([counts[v] for v in support], dtype=float)
        return cls(tuple(support), arr / arr.sum())


def ordered_support(values, kind: str = "categorical") -> tuple[str, ...]:
    """Dataset-wide support order: ascending, numerically for ordinal values."""
    if kind == "numeric_ordinal":
        return tuple(sorted(values, key=int))
    return tuple(sorted(values))


# ---------------------------------------------------------------------------
# count-matrix kernels (classes x support values)
# ---------------------------------------------------------------------------

def equal_distance_rows(class_mass: np.ndarray, global_mass: np.ndarray) -> np.ndarray:
    """Half L1 distance of each row distribution to the global one."""
    return 0.5 * np.abs(class_mass - global_mass).sum(axis=1)


def ordered_distance_rows(class_mass: np.ndarray, global_mass: np.ndarray) -> np.ndarray:
    """Cumulative-difference distance per row, normalized by support size - 1."""
    m = class_mass.shape[1]
    if m < 2:
        return np.zeros(class_mass.shape[0])
    return np.abs(np.cumsum(class_mass - global_mass, axis=1)).sum(axis=1) / (m - 1)


def max_t_from_counts(counts: np.ndarray, kind: str = "categorical") -> float:
    """Largest class-to-global distribution distance given integer counts."""
    totals = counts.sum(axis=1, keepdims=True)
    class_mass = counts / totals
    global_counts = counts.sum(axis=0)
    global_mass = global_counts / global_counts.sum()
    if kind == "numeric_ordinal":
        distances = ordered_distance_rows(class_mass, global_mass)
    else:
        distances = equal_distance_rows(class_mass, global_mass)
    return float(distances.max())


def max_delta_from_counts(counts: np.ndarray) -> float:
    """Largest |ln(class probability / global probability)| over present values.

    Pairs where the class probability is zero are skipped (log undefined); the
    global probability of any present value is positive by construction.
    """
    totals = counts.sum(axis=1, keepdims=True)
    class_mass = counts / totals
    global_counts = counts.sum(axis=0)
    global_mass = global_counts / global_counts.sum()
    present = class_mass > 0
    ratios = np.where(present, class_mass / global_mass, 1.0)
    return float(np.abs(np.log(ratios)).max())


def min_distinct_from_counts(counts: np.ndarray) -> int:
    return int((counts > 0).sum(axis=1).min())


def _counts_matrix(partition: Partition, support: tuple[str, ...]) -> np.ndarray:
    index = {v: j for j, v in enumerate(support)}
    counts = np.zeros((len(partition.classes), len(support)), dtype=np.int64)
    for i, ec in enumerate(partition.classes):
        for value, n in ec.sa_counts.items():
            counts[i, index[value]] = n
    return counts


def _partition_support(partition: Partition, kind: str) -> tuple[str, ...]:
    values = set()
    for ec in partition.classes:
        values.update(ec.sa_counts)
    return ordered_support(values, kind)


def _require_classes(partition: Partition) -> None:
    if not partition.classes:
        raise ValueError("partition has no equivalence classes")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def achieved_k(partition: Partition) -> int:
    """Minimum class size."""
    _require_classes(partition)
    return min(ec.size for ec in partition.classes)


def achieved_l(partition: Partition) -> int:
    """Minimum number of distinct sensitive values in a class."""
    _require_classes(partition)
    return min(sum(1 for n in ec.sa_counts.values() if n > 0) for ec in partition.classes)


def dist_equal(p: Distribution, q: Distribution) -> float:
    """Equal distance between two distributions on the same support."""
    if p.support != q.support:
        raise ValueError("distributions have different supports")
    return float(equal_distance_rows(p.mass[None, :], q.mass)[0])


def emd_ordered(p: Distribution, q: Distribution) -> float:
    """Ordered (cumulative) distance between distributions on the same ordered support."""
    if p.support != q.support:
        raise ValueError("distributions have different supports")
    return float(ordered_distance_rows(p.mass[None, :], q.mass)[0])


def achieved_t(partition: Partition, kind: str = "categorical") -> float:
    """Largest distance from a class distribution to the whole-table distribution.

    Ordinal sensitive attributes use the ordered distance; categorical ones the
    equal distance. The whole-table distribution covers non-suppressed records.
    """
    _require_classes(partition)
    support = _partition_support(partition, kind)
    return max_t_from_counts(_counts_matrix(partition, support), kind)


def achieved_delta(partition: Partition) -> float:
    """Largest |ln(p(class, s) / p(table, s))| over classes and present values."""
    _require_classes(partition)
    support = _partition_support(partition, "categorical")
    return max_delta_from_counts(_counts_matrix(partition, support))


def audit(dataset: Dataset, suppressed_count: int = 0) -> PrivacyAudit:
    """Partition ``dataset`` and measure every achieved guarantee."""
    if dataset.row_count == 0:
        raise ValueError("cannot audit an empty dataset")
    partition = partition_classes(dataset)
    kind = dataset.sensitive_attribute().kind
    return PrivacyAudit(
        achieved_k=achieved_k(partition),
        achieved_l=achieved_l(partition),
        achieved_t=achieved_t(partition, kind),
        achieved_delta=achieved_delta(partition),
        class_count=len(partition.classes),
        record_count=dataset.row_count,
        suppressed_count=suppressed_count,
    )


def satisfies(
    partition: Partition, requirement: PrivacyRequirement, kind: str = "categorical"
) -> bool:
    """True iff the partition meets every requested guarantee.

    The closeness bound is inclusive (<= t); the disclosure bound is strict
    (< delta). A partition with no classes never satisfies.
    """
    if not partition.classes:
        return False
    if achieved_k(partition) < requirement.k:
        return False
    if requirement.l is not None and achieved_l(partition) < requirement.l:
        return False
    if requirement.t is not None and achieved_t(partition, kind) > requirement.t:
        return False
    if requirement.delta is not None and not achieved_delta(partition) < requirement.delta:
        return False
    return True
