"""Core data model: instances, subgroups, subgroup pairs and pairwise subsets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

# A subgroup is one combination of sensitive-attribute values, e.g.
# ("non-white", "female"). Plain tuples so they sort and hash naturally.
SubgroupKey = tuple[str, ...]


class ClassLabel(IntEnum):
    """Binary outcome; FAVORABLE is the positive class everywhere."""

    UNFAVORABLE = 0
    FAVORABLE = 1

    @property
    def favorable(self) -> bool:
        return self is ClassLabel.FAVORABLE


@dataclass(frozen=True)
class Instance:
    """One row: sensitive values, encoded features and class labels."""

    sensitive: SubgroupKey
    features: np.ndarray
    true_class: ClassLabel
    determined_class: ClassLabel | None = None


@dataclass(frozen=True)
class SubgroupPair:
    """Unordered pair of distinct subgroups, stored in canonical order."""

    first: SubgroupKey
    second: SubgroupKey

    def __post_init__(self) -> None:
        if self.first == self.second:
            raise ValueError(f"pair members must differ, got {self.first!r} twice")
        if self.second < self.first:
            a, b = self.first, self.second
            object.__setattr__(self, "first", b)
            object.__setattr__(self, "second", a)

    def __contains__(self, key: SubgroupKey) -> bool:
        return key == self.first or key == self.second

    def other(self, key: SubgroupKey) -> SubgroupKey:
        if key == self.first:
            return self.second
        if key == self.second:
            return self.first
        raise KeyError(f"{key!r} is not a member of {self}")

    def __str__(self) -> str:
        return f"{'|'.join(self.first)} vs {'|'.join(self.second)}"


class Dataset:
    """Immutable column-oriented dataset.

    Rows are exposed as :class:`Instance` values, but bulk storage is numpy:
    ``features`` is an (n, m) float matrix, ``labels`` an int8 vector with
    1 = favorable, and ``sensitive_rows`` one SubgroupKey per row.
    """

    def __init__(
        self,
        sensitive_rows: Sequence[SubgroupKey],
        features: np.ndarray,
        labels: Sequence[int] | np.ndarray,
        sensitive_schema: dict[str, tuple[str, ...]],
        feature_schema: tuple[str, ...],
        determined: Sequence[int] | np.ndarray | None = None,
    ) -> None:
        self.features = np.ascontiguousarray(features, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.int8)
        self.sensitive_rows: tuple[SubgroupKey, ...] = tuple(
            tuple(row) for row in sensitive_rows
        )
        self.sensitive_schema = dict(sensitive_schema)
        self.feature_schema = tuple(feature_schema)
        self.determined = None if determined is None else np.asarray(determined, dtype=np.int8)

        n = len(self.sensitive_rows)
        if n == 0:
            raise ValueError("dataset must contain at least one instance")
        if self.features.ndim != 2 or self.features.shape[0] != n:
            raise ValueError(
                f"features must be (n, m) with n={n}, got shape {self.features.shape}"
            )
        if self.features.shape[1] != len(self.feature_schema):
            raise ValueError("feature_schema length does not match feature columns")
        if self.labels.shape != (n,):
            raise ValueError("labels length does not match instance count")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain missing or non-finite values")
        width = len(self.sensitive_schema)
        for row in self.sensitive_rows:
            if len(row) != width:
                raise ValueError(
                    f"sensitive tuple {row!r} does not match schema width {width}"
                )
        self.features.setflags(write=False)
        self.labels.setflags(write=False)
        if self.determined is not None:
            self.determined.setflags(write=False)

    def __len__(self) -> int:
        return len(self.sensitive_rows)

    @property
    def n(self) -> int:
        return len(self.sensitive_rows)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def __getitem__(self, i: int) -> Instance:
        det = None if self.determined is None else ClassLabel(int(self.determined[i]))
        return Instance(
            sensitive=self.sensitive_rows[i],
            features=self.features[i],
            true_class=ClassLabel(int(self.labels[i])),
            determined_class=det,
        )

    @property
    def instances(self) -> list[Instance]:
        return [self[i] for i in range(len(self))]

    def subgroup_mask(self, key: SubgroupKey) -> np.ndarray:
        return np.fromiter(
            (row == key for row in self.sensitive_rows), dtype=bool, count=len(self)
        )

    def select(self, indices: np.ndarray) -> "Dataset":
        """New dataset with the given rows, order preserved."""
        indices = np.asarray(indices)
        return Dataset(
            sensitive_rows=[self.sensitive_rows[int(i)] for i in indices],
            features=self.features[indices],
            labels=self.labels[indices],
            sensitive_schema=self.sensitive_schema,
            feature_schema=self.feature_schema,
            determined=None if self.determined is None else self.determined[indices],
        )

    def with_labels(
        self, labels: np.ndarray, determined: np.ndarray | None = None
    ) -> "Dataset":
        """Copy of the dataset with replaced class labels."""
        return Dataset(
            sensitive_rows=self.sensitive_rows,
            features=self.features,
            labels=labels,
            sensitive_schema=self.sensitive_schema,
            feature_schema=self.feature_schema,
            determined=determined,
        )

    def project_sensitive(self, attribute: str) -> "Dataset":
        """Collapse the sensitive tuple to a single named attribute.

        Used for single-attribute baselines: the result groups rows only by
        the chosen attribute, leaving features and labels untouched.
        """
        names = list(self.sensitive_schema)
        if attribute not in names:
            raise KeyError(
                f"unknown sensitive attribute {attribute!r}; have {names}"
            )
        pos = names.index(attribute)
        return Dataset(
            sensitive_rows=[(row[pos],) for row in self.sensitive_rows],
            features=self.features,
            labels=self.labels,
            sensitive_schema={attribute: self.sensitive_schema[attribute]},
            feature_schema=self.feature_schema,
            determined=self.determined,
        )


def enumerate_subgroups(dataset: Dataset) -> list[SubgroupKey]:
    """Distinct subgroups present in the data, in lexicographic order.

    Subgroups come from the data rather than the schema cross-product, so
    empty intersections never appear.
    """
    return sorted(set(dataset.sensitive_rows))


def enumerate_pairs(subgroups: Sequence[SubgroupKey]) -> list[SubgroupPair]:
    """All unordered pairs of subgroups, in deterministic order."""
    if len(subgroups) < 2:
        raise ValueError(
            f"pairwise mitigation needs at least 2 subgroups, got {len(subgroups)}"
        )
    ordered = sorted(subgroups)
    return [SubgroupPair(a, b) for a, b in itertools.combinations(ordered, 2)]


def pair_subset(dataset: Dataset, pair: SubgroupPair) -> Dataset:
    """Rows belonging to either member of the pair, original order kept."""
    mask = dataset.subgroup_mask(pair.first) | dataset.subgroup_mask(pair.second)
    if not mask.any():
        raise ValueError(f"pair {pair} has no instances in the dataset")
    for key in (pair.first, pair.second):
        if not dataset.subgroup_mask(key).any():
            raise ValueError(f"subgroup {key!r} has no instances in the dataset")
    return dataset.select(np.flatnonzero(mask))


def pair_subset_indices(dataset: Dataset, pair: SubgroupPair) -> np.ndarray:
    """Row indices of :func:`pair_subset`, for callers that track positions."""
    mask = dataset.subgroup_mask(pair.first) | dataset.subgroup_mask(pair.second)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise ValueError(f"pair {pair} has no instances in the dataset")
    return idx


def pairs_for_subgroup(
    pairs: Sequence[SubgroupPair], s: SubgroupKey
) -> list[SubgroupPair]:
    """The pairs containing subgroup ``s``; exactly |S|-1 of them."""
    found = [p for p in pairs if s in p]
    if not found:
        raise KeyError(f"subgroup {s!r} does not appear in any pair")
    return found
