"""Value generalization hierarchies (taxonomy tables) and their application.

Hierarchy files are UTF-8, semicolon-delimited, one row per raw value, no
header: column 0 is the raw value, column j its level-j generalization. All
rows must have the same width; height = columns - 1. A top level may be the
suppression token ``*``. Attributes without a hierarchy get an implicit
height-0 identity hierarchy and are never generalized.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .data import Dataset

SUPPRESSION_TOKEN = "*"

# One generalization level per quasi-identifier, in schema order.
GeneralizationVector = tuple[int, ...]


@dataclass(frozen=True)
class Hierarchy:
    """Per-attribute taxonomy: raw value -> tuple of generalizations by level."""

    attribute: str
    height: int
    paths: dict[str, tuple[str, ...]]

    def levels(self, value: str) -> tuple[str, ...]:
        try:
            return self.paths[value]
        except KeyError:
            raise ValueError(
                f"value {value!r} is not covered by the {self.attribute!r} hierarchy"
            ) from None


def identity_hierarchy(attribute: str, values: Iterable[str]) -> Hierarchy:
    """Height-0 hierarchy mapping every value to itself."""
    return Hierarchy(attribute, 0, {v: (v,) for v in values})


def load_hierarchy(source: str | Path | IO[str], attribute: str) -> Hierarchy:
    """Parse a semicolon-delimited hierarchy file for ``attribute``."""
    if isinstance(source, (str, Path)):
        stream = open(source, encoding="utf-8", newline="")
        owned = True
    else:
        stream, owned = source, False
    paths: dict[str, tuple[str, ...]] = {}
    width: int | None = None
    try:
        for i, row in enumerate(csv.reader(stream, delimiter=";"), start=1):
            cells = tuple(c.strip() for c in row)
            if not cells:
                raise ValueError(f"{attribute} hierarchy row {i}: empty row")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ValueError(
                    f"{attribute} hierarchy row {i}: expected {width} columns, found {len(cells)}"
                )
            key = cells[0]
            if key in paths and paths[key] != cells:
                raise ValueError(f"{attribute} hierarchy: conflicting paths for value {key!r}")
            paths[key] = cells
    finally:
        if owned:
            stream.close()
    if width is None:
        raise ValueError(f"{attribute} hierarchy: no rows")
    return Hierarchy(attribute, width - 1, paths)


def generalize_value(hierarchy: Hierarchy, value: str, level: int) -> str:
    """Level-j generalization of ``value``; level 0 is the value itself."""
    if not 0 <= level <= hierarchy.height:
        raise ValueError(
            f"level {level} out of range 0..{hierarchy.height} "
            f"for attribute {hierarchy.attribute!r}"
        )
    return hierarchy.levels(value)[level]


def validate_hierarchy(hierarchy: Hierarchy, dataset: Dataset, attribute: str) -> list[str]:
    """Distinct dataset values of ``attribute`` that the hierarchy does not cover."""
    values = set(dataset.column(attribute))
    return sorted(values - hierarchy.paths.keys())


def monotone_violations(hierarchy: Hierarchy) -> list[str]:
    """Check that each level refines into exactly one value of the next level.

    Returns human-readable violation descriptions; empty means the hierarchy
    is a proper chain of coarsenings.
    """
    problems = []
    for level in range(hierarchy.height):
        seen: dict[str, str] = {}
        for path in hierarchy.paths.values():
            parent = seen.get(path[level])
            if parent is None:
                seen[path[level]] = path[level + 1]
            elif parent != path[level + 1]:
                problems.append(
                    f"{hierarchy.attribute}: level-{level} group {path[level]!r} maps to "
                    f"both {parent!r} and {path[level + 1]!r} at level {level + 1}"
                )
    return problems


def load_hierarchy_dir(directory: str | Path) -> dict[str, Hierarchy]:
    """Load every ``<attribute>.csv`` hierarchy file in a directory."""
    directory = Path(directory)
    hierarchies = {}
    for path in sorted(directory.glob("*.csv")):
        hierarchies[path.stem] = load_hierarchy(path, path.stem)
    return hierarchies


def hierarchies_for_dataset(
    dataset: Dataset, directory: str | Path | None = None
) -> dict[str, Hierarchy]:
    """Hierarchies for every quasi-identifier of ``dataset``.

    Attributes with a ``<name>.csv`` file in ``directory`` use it; the rest get
    identity hierarchies built from their distinct dataset values.
    """
    loaded = load_hierarchy_dir(directory) if directory is not None else {}
    out = {}
    for attr in dataset.quasi_identifiers():
        if attr.name in loaded:
            out[attr.name] = loaded[attr.name]
        else:
            out[attr.name] = identity_hierarchy(attr.name, sorted(set(dataset.column(attr.name))))
    return out
