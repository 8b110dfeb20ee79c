"""Feature encoding of (possibly generalized) tables into numeric matrices.

Every quasi-identifier is one-hot encoded over the vocabulary seen in the
training split; generalized interval values and the suppression token are
categories like any other. Categories unseen at fit time encode to an
all-zeros block. The sensitive column becomes the binary label and never
appears among the features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset


@dataclass(frozen=True)
class LabeledMatrix:
    """Numeric feature matrix with aligned binary labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class EncoderState:
    """Frozen per-attribute vocabularies and strategies learned from training data."""

    attributes: tuple[str, ...]
    vocabularies: dict[str, tuple[str, ...]]
    strategies: dict[str, str]
    sensitive: str
    positive_label: str


def fit_encoder(
    train: Dataset,
    positive_label: str | None = None,
    ordinal: frozenset[str] | set[str] = frozenset(),
) -> EncoderState:
    """Learn vocabularies from a training split.

    ``positive_label`` defaults to the last distinct sensitive value in
    ascending order (">50K" for the census salary classes). Attributes listed
    in ``ordinal`` encode as a single vocabulary-index column instead of
    one-hot (unseen values encode to -1).
    """
    if train.row_count == 0:
        raise ValueError("cannot fit an encoder on an empty training set")
    sensitive = train.sensitive_attribute().name
    if positive_label is None:
        positive_label = sorted(set(train.column(sensitive)))[-1]
    attributes = tuple(a.name for a in train.quasi_identifiers())
    vocabularies = {}
    strategies = {}
    for name in attributes:
        vocabularies[name] = tuple(sorted(set(train.column(name))))
        strategies[name] = "ordinal" if name in ordinal else "onehot"
    return EncoderState(attributes, vocabularies, strategies, sensitive, positive_label)


def encode(state: EncoderState, dataset: Dataset) -> LabeledMatrix:
    """Encode a dataset with a fitted encoder."""
    n = dataset.row_count
    if n == 0:
        raise ValueError("cannot encode an empty dataset")
    blocks = []
    names: list[str] = []
    for attr in state.attributes:
        vocab = state.vocabularies[attr]
        index = {v: i for i, v in enumerate(vocab)}
        col = dataset.column(attr)
        if state.strategies[attr] == "ordinal":
            block = np.array([[index.get(v, -1)] for v in col], dtype=float)
            names.append(attr)
        else:
            block = np.zeros((n, len(vocab)))
            rows = [i for i, v in enumerate(col) if v in index]
            cols = [index[col[i]] for i in rows]
            block[rows, cols] = 1.0
            names.extend(f"{attr}={v}" for v in vocab)
        blocks.append(block)
    features = np.concatenate(blocks, axis=1)
    labels = np.array(
        [1 if v == state.positive_label else 0 for v in dataset.column(state.sensitive)],
        dtype=np.int64,
    )
    return LabeledMatrix(features, labels, tuple(names))
