"""Dataset ingestion, attribute schema, identifier removal, stratified splitting.

Dataset files are UTF-8 CSV with exactly one header row. Cells are trimmed of
surrounding whitespace on load. Missing source values are expected to be the
literal ``?`` and are kept as an ordinary categorical token. Schema files are
CSV with the header ``name,role,kind`` (see :func:`load_schema`).
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Sequence

ROLES = ("identifier", "quasi_identifier", "sensitive", "insensitive")
KINDS = ("categorical", "numeric_ordinal")


@dataclass(frozen=True)
class AttributeSchema:
    """One column: its name, privacy role, and value kind."""

    name: str
    role: str
    kind: str = "categorical"

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r} for attribute {self.name!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r} for attribute {self.name!r}")


@dataclass(frozen=True)
class Dataset:
    """Immutable rectangular table of text cells aligned to a schema.

    Rows are tuples of cell strings in schema order. At most one attribute may
    carry the ``sensitive`` role; operations that need the sensitive column
    raise if it is absent.
    """

    schema: tuple[AttributeSchema, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        names = [a.name for a in self.schema]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique within a schema")
        sensitive = [a.name for a in self.schema if a.role == "sensitive"]
        if len(sensitive) > 1:
            raise ValueError(f"at most one sensitive attribute supported, got {sensitive}")
        width = len(self.schema)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i}: expected {width} cells, found {len(row)}")

    @property
    def row_count(self) -> int:
        return len(self.rows)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.schema)

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.schema):
            if a.name == name:
                return i
        raise KeyError(f"no attribute named {name!r}")

    def column(self, name: str) -> list[str]:
        j = self.index_of(name)
        return [row[j] for row in self.rows]

    def quasi_identifiers(self) -> tuple[AttributeSchema, ...]:
        return tuple(a for a in self.schema if a.role == "quasi_identifier")

    def sensitive_attribute(self) -> AttributeSchema:
        for a in self.schema:
            if a.role == "sensitive":
                return a
        raise ValueError("dataset has no sensitive attribute")


@dataclass(frozen=True)
class SplitPair:
    """Disjoint train/test datasets whose union is the input, with the seed used."""

    train: Dataset
    test: Dataset
    seed: int


def _open_text(source: str | Path | IO[str], mode: str = "r"):
    if isinstance(source, (str, Path)):
        return open(source, mode, encoding="utf-8", newline=""), True
    return source, False


def load_schema(source: str | Path | IO[str]) -> tuple[AttributeSchema, ...]:
    """Read a schema file: CSV with header ``name,role,kind``."""
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        header = [c.strip() for c in next(reader, [])]
        if header != ["name", "role", "kind"]:
            raise ValueError(f"schema file must start with header name,role,kind, got {header}")
        attrs = []
        for i, row in enumerate(reader, start=1):
            if len(row) != 3:
                raise ValueError(f"schema row {i}: expected 3 cells, found {len(row)}")
            name, role, kind = (c.strip() for c in row)
            attrs.append(AttributeSchema(name, role, kind))
    finally:
        if owned:
            stream.close()
    return tuple(attrs)


def load_dataset(source: str | Path | IO[str], schema: Sequence[AttributeSchema]) -> Dataset:
    """Parse a CSV table against ``schema``.

    The header must contain exactly the schema's attribute names (any order);
    columns are reordered to schema order. Every data row must have exactly
    one cell per attribute. Cells are whitespace-trimmed. ``numeric_ordinal``
    attributes must parse as integers.
    """
    schema = tuple(schema)
    sensitive = [a for a in schema if a.role == "sensitive"]
    if len(sensitive) != 1:
        raise ValueError("schema must declare exactly one sensitive attribute")
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        raw_header = next(reader, None)
        if raw_header is None:
            raise ValueError("empty input: expected a header row")
        header = [c.strip() for c in raw_header]
        names = [a.name for a in schema]
        if set(header) != set(names) or len(set(header)) != len(header):
            missing = sorted(set(names) - set(header))
            extra = sorted(set(header) - set(names))
            raise ValueError(
                f"header does not match schema: missing {missing}, unexpected {extra}"
            )
        perm = [header.index(n) for n in names]
        rows = []
        for i, raw in enumerate(reader, start=1):
            if len(raw) != len(header):
                raise ValueError(f"row {i}: expected {len(header)} cells, found {len(raw)}")
            cells = [c.strip() for c in raw]
            rows.append(tuple(cells[j] for j in perm))
    finally:
        if owned:
            stream.close()
    dataset = Dataset(schema, tuple(rows))
    for a in schema:
        if a.kind != "numeric_ordinal":
            continue
        j = dataset.index_of(a.name)
        for i, row in enumerate(dataset.rows):
            try:
                int(row[j])
            except ValueError:
                raise ValueError(
                    f"attribute {a.name!r} is numeric_ordinal but row {i + 1} "
                    f"has non-integer value {row[j]!r}"
                ) from None
    return dataset


def serialize_dataset(dataset: Dataset, target: str | Path | IO[str]) -> None:
    """Write a dataset back to CSV; inverse of :func:`load_dataset`."""
    stream, owned = _open_text(target, "w")
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(dataset.attribute_names)
        writer.writerows(dataset.rows)
    finally:
        if owned:
            stream.close()


def drop_identifiers(dataset: Dataset) -> Dataset:
    """Remove every column whose role is ``identifier``; row order preserved."""
    keep = [i for i, a in enumerate(dataset.schema) if a.role != "identifier"]
    if len(keep) == len(dataset.schema):
        return dataset
    schema = tuple(dataset.schema[i] for i in keep)
    rows = tuple(tuple(row[i] for i in keep) for row in dataset.rows)
    return Dataset(schema, rows)


def split_stratified(dataset: Dataset, train_fraction: float, seed: int) -> SplitPair:
    """Deterministic stratified split on the sensitive attribute.

    Each label contributes floor(count * fraction) rows to the train side,
    topped up by largest-remainder rounding until the train size equals
    round(row_count * fraction); remainder ties break by ascending label.
    Selection within each label group is a seeded Fisher-Yates shuffle,
    consumed in ascending label order, so results are reproducible.
    """
    frac = Fraction(train_fraction)
    if not 0 < frac < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    label_col = dataset.index_of(dataset.sensitive_attribute().name)
    groups: dict[str, list[int]] = {}
    for i, row in enumerate(dataset.rows):
        groups.setdefault(row[label_col], []).append(i)
    for label, members in sorted(groups.items()):
        if len(members) < 2:
            raise ValueError(f"label {label!r} occurs only once; cannot stratify")

    total_train = int(dataset.row_count * frac + Fraction(1, 2))
    quotas: dict[str, int] = {}
    remainders: list[tuple[Fraction, str]] = []
    for label, members in groups.items():
        target = len(members) * frac
        quotas[label] = int(target)  # floor: target >= 0
        remainders.append((target - int(target), label))
    shortfall = total_train - sum(quotas.values())
    remainders.sort(key=lambda item: (-item[0], item[1]))
    for _, label in remainders[:shortfall]:
        quotas[label] += 1

    rng = random.Random(seed)
    train_idx: list[int] = []
    for label in sorted(groups):
        members = list(groups[label])
        rng.shuffle(members)
        train_idx.extend(members[: quotas[label]])
    train_set = set(train_idx)
    train_rows = tuple(dataset.rows[i] for i in sorted(train_set))
    test_rows = tuple(row for i, row in enumerate(dataset.rows) if i not in train_set)
    return SplitPair(
        train=Dataset(dataset.schema, train_rows),
        test=Dataset(dataset.schema, test_rows),
        seed=seed,
    )
