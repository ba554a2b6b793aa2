"""Subgroup fairness metrics, worst-case disparities and balanced accuracy.

All metric values are probabilities computed from integer confusion counts,
so two code paths that count the same events produce bit-identical floats.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .model import SubgroupKey


class Criterion(str, Enum):
    DEMOGRAPHIC_PARITY = "demographic_parity"
    EQUALIZED_ODDS = "equalized_odds"
    EQUAL_OPPORTUNITY = "equal_opportunity"


class DisparityForm(str, Enum):
    DIFFERENCE = "difference"
    RATIO = "ratio"


@dataclass(frozen=True)
class MetricSpec:
    criterion: Criterion
    disparity_form: DisparityForm = DisparityForm.DIFFERENCE


class UndefinedMetricError(ValueError):
    """The requested rate has an empty denominator (e.g. TPR with no positives)."""


def _rates(preds: np.ndarray, truths: np.ndarray) -> tuple[int, int, int, int]:
    """Confusion counts (tp, fp, pos, neg) with 1 = favorable."""
    preds = np.asarray(preds)
    truths = np.asarray(truths)
    pos = int(np.count_nonzero(truths == 1))
    neg = int(truths.size - pos)
    tp = int(np.count_nonzero((preds == 1) & (truths == 1)))
    fp = int(np.count_nonzero((preds == 1) & (truths == 0)))
    return tp, fp, pos, neg


def value_from_counts(
    tp: int, fp: int, pos: int, neg: int, criterion: Criterion
) -> float:
    """Metric value from confusion counts; raises if a denominator is zero."""
    if criterion is Criterion.DEMOGRAPHIC_PARITY:
        n = pos + neg
        if n == 0:
            raise UndefinedMetricError("demographic parity over an empty set")
        return (tp + fp) / n
    if criterion is Criterion.EQUAL_OPPORTUNITY:
        if pos == 0:
            raise UndefinedMetricError("equal opportunity needs favorable truths")
        return tp / pos
    if criterion is Criterion.EQUALIZED_ODDS:
        if pos == 0 or neg == 0:
            raise UndefinedMetricError("equalized odds needs both truth classes")
        return (tp / pos + fp / neg) / 2
    raise ValueError(f"unknown criterion {criterion!r}")


def metric_value(
    preds: np.ndarray,
    truths: np.ndarray,
    mask: np.ndarray | None,
    criterion: Criterion,
) -> float:
    """Fairness-criterion value over the masked instances.

    demographic parity: P(Z=+); equal opportunity: TPR; equalized odds:
    (TPR + FPR) / 2.
    """
    preds = np.asarray(preds)
    truths = np.asarray(truths)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        preds = preds[mask]
        truths = truths[mask]
    if preds.size == 0:
        raise UndefinedMetricError("metric over an empty instance set")
    return value_from_counts(*_rates(preds, truths), criterion)


def gamma_diff(overall: float, per_subgroup: Mapping[SubgroupKey, float]) -> float:
    """Worst absolute gap between any subgroup value and the overall value."""
    if not per_subgroup:
        return 0.0
    return max(abs(overall - v) for v in per_subgroup.values())


def gamma_ratio(overall: float, per_subgroup: Mapping[SubgroupKey, float]) -> float:
    """Worst value of 1 - min(v/overall, overall/v) across subgroups.

    Degenerate zeros: both sides zero contribute 0 (equal in the limit);
    exactly one zero contributes 1 (worst-case reading).
    """
    worst = 0.0
    for v in per_subgroup.values():
        if overall == 0.0 and v == 0.0:
            contribution = 0.0
        elif overall == 0.0 or v == 0.0:
            contribution = 1.0
        else:
            contribution = 1.0 - min(v / overall, overall / v)
        worst = max(worst, contribution)
    return worst


def balanced_accuracy(preds: np.ndarray, truths: np.ndarray) -> float:
    """(TPR + TNR) / 2; robust to class imbalance."""
    tp, fp, pos, neg = _rates(np.asarray(preds), np.asarray(truths))
    if pos == 0 or neg == 0:
        raise UndefinedMetricError("balanced accuracy needs both truth classes")
    return (tp / pos + (neg - fp) / neg) / 2


@dataclass(frozen=True)
class DisparityReport:
    """Per-subgroup metric values with both disparity forms and accuracy."""

    criterion: Criterion
    per_subgroup: dict[SubgroupKey, float]
    overall: float
    gamma_diff: float
    gamma_ratio: float
    balanced_accuracy: float
    skipped_subgroups: tuple[SubgroupKey, ...] = field(default=())

    def gamma(self, form: DisparityForm) -> float:
        return self.gamma_diff if form is DisparityForm.DIFFERENCE else self.gamma_ratio

    def flat_row(self) -> dict[str, object]:
        """Scalar fields plus one ``value[<subgroup>]`` column per subgroup."""
        row: dict[str, object] = {
            "criterion": self.criterion.value,
            "overall": self.overall,
            "gamma_diff": self.gamma_diff,
            "gamma_ratio": self.gamma_ratio,
            "balanced_accuracy": self.balanced_accuracy,
        }
        for key, value in sorted(self.per_subgroup.items()):
            row[f"value[{'|'.join(key)}]"] = value
        return row

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "per_subgroup": [[list(k), v] for k, v in sorted(self.per_subgroup.items())],
            "overall": self.overall,
            "gamma_diff": self.gamma_diff,
            "gamma_ratio": self.gamma_ratio,
            "balanced_accuracy": self.balanced_accuracy,
            "skipped_subgroups": [list(k) for k in self.skipped_subgroups],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DisparityReport":
        return cls(
            criterion=Criterion(d["criterion"]),
            per_subgroup={tuple(k): v for k, v in d["per_subgroup"]},
            overall=d["overall"],
            gamma_diff=d["gamma_diff"],
            gamma_ratio=d["gamma_ratio"],
            balanced_accuracy=d["balanced_accuracy"],
            skipped_subgroups=tuple(tuple(k) for k in d["skipped_subgroups"]),
        )


def disparity(
    preds: np.ndarray,
    truths: np.ndarray,
    subgroups: Sequence[SubgroupKey],
    spec: MetricSpec,
) -> DisparityReport:
    """Full disparity report for one criterion.

    The overall value is computed over all instances (not averaged across
    subgroups). Subgroups where the criterion is undefined are excluded from
    the max with a warning; the overall value must be defined or this raises.
    """
    preds = np.asarray(preds)
    truths = np.asarray(truths)
    if preds.shape != truths.shape or len(subgroups) != preds.size:
        raise ValueError("preds, truths and subgroups must have equal length")

    overall = metric_value(preds, truths, None, spec.criterion)

    groups: dict[SubgroupKey, list[int]] = {}
    for i, key in enumerate(subgroups):
        groups.setdefault(tuple(key), []).append(i)

    per_subgroup: dict[SubgroupKey, float] = {}
    skipped: list[SubgroupKey] = []
    for key in sorted(groups):
        idx = np.asarray(groups[key])
        try:
            per_subgroup[key] = value_from_counts(
                *_rates(preds[idx], truths[idx]), spec.criterion
            )
        except UndefinedMetricError:
            skipped.append(key)
            warnings.warn(
                f"{spec.criterion.value} undefined for subgroup {key!r}; "
                "excluded from disparity",
                stacklevel=2,
            )

    try:
        bal_acc = balanced_accuracy(preds, truths)
    except UndefinedMetricError:
        bal_acc = float("nan")

    return DisparityReport(
        criterion=spec.criterion,
        per_subgroup=per_subgroup,
        overall=overall,
        gamma_diff=gamma_diff(overall, per_subgroup),
        gamma_ratio=gamma_ratio(overall, per_subgroup),
        balanced_accuracy=bal_acc,
        skipped_subgroups=tuple(skipped),
    )
