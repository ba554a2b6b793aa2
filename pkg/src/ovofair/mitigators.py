"""Per-pair bias mitigation functions.

Every mitigation approach is fitted on the training rows of one subgroup
pair and then evaluates instances of that pair to a (predicted class,
probability) tuple:

* massaging (pre-processing): promote/demote ranked training labels; the
  probability side is always 0 because no model output exists.
* reject-option (post-processing): flip plain-model predictions inside a
  low-confidence band in favor of the deprived subgroup.
* equalized odds / equal opportunity (post-processing): randomized label
  mixing per subgroup that equalizes error rates.
* fair-regularized logistic regression (in-processing): model trained with
  a between-group probability-gap penalty.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .classifier import LogisticModel, TrainConfig, fit, fit_fair_regularized
from .metrics import balanced_accuracy, UndefinedMetricError
from .model import Dataset, Instance, SubgroupKey, SubgroupPair

DEFAULT_ROC_WIDTH_GRID: tuple[float, ...] = tuple(np.round(np.arange(0.0, 0.51, 0.01), 2))
EO_GRID_STEP = 0.01
EO_FEASIBILITY_TOL = 0.01


class MitigationKind(str, Enum):
    MS = "MS"
    FAIR_LR = "FAIR_LR"
    ROC = "ROC"
    EO_ODDS = "EO_ODDS"
    EO_OPP = "EO_OPP"


@dataclass(frozen=True)
class PairContext:
    """Fitted state of one mitigation function on one subgroup pair."""

    kind: MitigationKind
    pair: SubgroupPair
    deprived: SubgroupKey
    params: dict

    def __post_init__(self) -> None:
        if self.deprived not in self.pair:
            raise ValueError(f"deprived {self.deprived!r} not a member of {self.pair}")

    def to_dict(self) -> dict:
        params = dict(self.params)
        if "model" in params:
            params["model"] = params["model"].to_dict()
        if "mix" in params:
            params["mix"] = [[list(k), list(v)] for k, v in sorted(params["mix"].items())]
        return {
            "schema_version": 1,
            "kind": self.kind.value,
            "pair": [list(self.pair.first), list(self.pair.second)],
            "deprived": list(self.deprived),
            "params": params,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairContext":
        params = dict(d["params"])
        if "model" in params:
            params["model"] = LogisticModel.from_dict(params["model"])
        if "mix" in params:
            params["mix"] = {tuple(k): tuple(v) for k, v in params["mix"]}
        return cls(
            kind=MitigationKind(d["kind"]),
            pair=SubgroupPair(tuple(d["pair"][0]), tuple(d["pair"][1])),
            deprived=tuple(d["deprived"]),
            params=params,
        )


def _pair_groups(pair_train: Dataset) -> tuple[SubgroupKey, SubgroupKey]:
    groups = sorted(set(pair_train.sensitive_rows))
    if len(groups) != 2:
        raise ValueError(
            f"pair training data must contain exactly 2 subgroups, got {len(groups)}"
        )
    return groups[0], groups[1]


def deprived_subgroup(pair_train: Dataset) -> SubgroupKey:
    """Pair member with the lower positive rate; ties go lexicographically."""
    a, b = _pair_groups(pair_train)
    mask_a = pair_train.subgroup_mask(a)
    rate_a = float(pair_train.labels[mask_a].mean())
    rate_b = float(pair_train.labels[~mask_a].mean())
    if rate_a == rate_b:
        return a
    return a if rate_a < rate_b else b


# ---------------------------------------------------------------------------
# Massaging (pre-processing)
# ---------------------------------------------------------------------------


def massaging_fit(
    pair_train: Dataset, ranker_config: TrainConfig = TrainConfig()
) -> tuple[Dataset, PairContext]:
    """Equalize the pair's positive rates by promoting/demoting ranked labels.

    A plain ranker supplies scores; the top-scored negatives of the deprived
    subgroup are promoted and the bottom-scored positives of the favored
    subgroup demoted, using the smallest count that brings the two positive
    rates within one instance of each other. The total number of favorable
    labels is unchanged.
    """
    a, b = _pair_groups(pair_train)
    deprived = deprived_subgroup(pair_train)
    favored = a if deprived == b else b

    ranker = fit(pair_train, ranker_config)
    scores = ranker.proba_matrix(pair_train.features)
    labels = pair_train.labels

    dep_mask = pair_train.subgroup_mask(deprived)
    fav_mask = ~dep_mask
    n_d, n_f = int(dep_mask.sum()), int(fav_mask.sum())
    p_d = int(labels[dep_mask].sum())
    p_f = int(labels[fav_mask].sum())

    def gap(m: int) -> float:
        return abs((p_d + m) / n_d - (p_f - m) / n_f)

    exact = (p_f * n_d - p_d * n_f) / (n_d + n_f)
    cap = min(n_d - p_d, p_f)
    candidates = {min(max(int(np.floor(exact)), 0), cap), min(max(int(np.ceil(exact)), 0), cap)}
    swap = min(candidates, key=lambda m: (gap(m), m))

    promote_pool = np.flatnonzero(dep_mask & (labels == 0))
    demote_pool = np.flatnonzero(fav_mask & (labels == 1))
    promoted = promote_pool[np.argsort(-scores[promote_pool], kind="stable")[:swap]]
    demoted = demote_pool[np.argsort(scores[demote_pool], kind="stable")[:swap]]

    relabeled = np.array(labels)
    relabeled[promoted] = 1
    relabeled[demoted] = 0

    ctx = PairContext(
        kind=MitigationKind.MS,
        pair=SubgroupPair(a, b),
        deprived=deprived,
        params={
            "swap_count": int(swap),
            "promoted": sorted(int(i) for i in promoted),
            "demoted": sorted(int(i) for i in demoted),
        },
    )
    return pair_train.with_labels(relabeled), ctx


def massaging_eval(relabeled: Dataset, row: int) -> tuple[int, float]:
    """Mitigated class of a training row in the relabeled pair subset; R is 0."""
    if not 0 <= row < len(relabeled):
        raise IndexError(f"row {row} outside relabeled subset of size {len(relabeled)}")
    return int(relabeled.labels[row]), 0.0


# ---------------------------------------------------------------------------
# Reject-option classification (post-processing)
# ---------------------------------------------------------------------------


def _roc_flip(
    probas: np.ndarray, is_deprived: np.ndarray | bool, width: float
) -> np.ndarray:
    base = probas > 0.5
    in_region = np.abs(probas - 0.5) < width
    return np.where(in_region, is_deprived, base).astype(np.int8)


def roc_fit(
    plain_model: LogisticModel,
    pair_train: Dataset,
    width_grid: Sequence[float] = DEFAULT_ROC_WIDTH_GRID,
) -> PairContext:
    """Pick the critical-region half-width minimizing the pair's rate gap.

    Ties prefer higher balanced accuracy, then the smaller width.
    """
    if len(width_grid) == 0:
        raise ValueError("width grid is empty")
    a, b = _pair_groups(pair_train)
    deprived = deprived_subgroup(pair_train)
    dep_mask = pair_train.subgroup_mask(deprived)
    probas = plain_model.proba_matrix(pair_train.features)

    best: tuple[float, float, float] | None = None
    best_width = None
    for width in width_grid:
        flipped = _roc_flip(probas, dep_mask, float(width))
        disparity = abs(float(flipped[dep_mask].mean()) - float(flipped[~dep_mask].mean()))
        try:
            acc = balanced_accuracy(flipped, pair_train.labels)
        except UndefinedMetricError:
            acc = float((flipped == pair_train.labels).mean())
        key = (disparity, -acc, float(width))
        if best is None or key < best:
            best = key
            best_width = float(width)
    return PairContext(
        kind=MitigationKind.ROC,
        pair=SubgroupPair(a, b),
        deprived=deprived,
        params={"width": best_width},
    )


def roc_eval_batch(
    ctx: PairContext,
    plain_model: LogisticModel,
    features: np.ndarray,
    key: SubgroupKey,
) -> tuple[np.ndarray, np.ndarray]:
    """Reject-option predictions for rows that all belong to subgroup ``key``."""
    if key not in ctx.pair:
        raise KeyError(f"subgroup {key!r} is not a member of {ctx.pair}")
    probas = plain_model.proba_matrix(features)
    votes = _roc_flip(probas, key == ctx.deprived, ctx.params["width"])
    return votes, probas


def roc_eval(
    instance: Instance, ctx: PairContext, plain_model: LogisticModel
) -> tuple[int, float]:
    votes, probas = roc_eval_batch(
        ctx, plain_model, instance.features[None, :], instance.sensitive
    )
    return int(votes[0]), float(probas[0])


# ---------------------------------------------------------------------------
# Equalized odds / equal opportunity mixing (post-processing)
# ---------------------------------------------------------------------------


def _mix_side(
    tpr: float, fpr: float, pos: int, neg: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All (keep_pos, flip_neg) grid combos with mixed rates and correct counts."""
    grid = np.round(np.arange(0.0, 1.0 + EO_GRID_STEP / 2, EO_GRID_STEP), 10)
    keep, flip = np.meshgrid(grid, grid, indexing="ij")
    keep, flip = keep.ravel(), flip.ravel()
    tpr_mix = keep * tpr + flip * (1.0 - tpr)
    fpr_mix = keep * fpr + flip * (1.0 - fpr)
    correct = pos * tpr_mix + neg * (1.0 - fpr_mix)
    return keep, flip, tpr_mix, fpr_mix, correct


def eo_fit(
    plain_model: LogisticModel,
    pair_train: Dataset,
    criterion: str,
) -> PairContext:
    """Find per-subgroup label-mixing rates that equalize error rates.

    criterion "odds" equalizes TPR and FPR, "opportunity" TPR only, both to
    within the feasibility tolerance; among feasible rates the expected
    accuracy on the pair's training data is maximized by dense grid search.
    """
    if criterion not in ("odds", "opportunity"):
        raise ValueError(f"criterion must be 'odds' or 'opportunity', got {criterion!r}")
    a, b = _pair_groups(pair_train)
    deprived = deprived_subgroup(pair_train)

    sides = {}
    base = (plain_model.proba_matrix(pair_train.features) > 0.5).astype(np.int8)
    for key in (a, b):
        mask = pair_train.subgroup_mask(key)
        y = pair_train.labels[mask]
        z = base[mask]
        pos = int((y == 1).sum())
        neg = int((y == 0).sum())
        if pos == 0 or neg == 0:
            raise ValueError(f"subgroup {key!r} lacks a truth class; cannot equalize rates")
        tpr = float((z[y == 1] == 1).mean())
        fpr = float((z[y == 0] == 1).mean())
        sides[key] = _mix_side(tpr, fpr, pos, neg)

    keep_a, flip_a, tpr_a, fpr_a, correct_a = sides[a]
    keep_b, flip_b, tpr_b, fpr_b, correct_b = sides[b]

    # Sort side b by mixed TPR so a tolerance window is a binary-searched
    # slice; iterate side a by decreasing correct count with an upper-bound
    # prune. Exact maximizer, deterministic tie-break (first found).
    order_b = np.lexsort((np.arange(tpr_b.size), tpr_b))
    tpr_b_sorted = tpr_b[order_b]
    order_a = np.lexsort((np.arange(correct_a.size), -correct_a))
    max_correct_b = float(correct_b.max())

    best_total = -np.inf
    best_pair = None
    for i in order_a:
        if correct_a[i] + max_correct_b <= best_total:
            break
        lo = np.searchsorted(tpr_b_sorted, tpr_a[i] - EO_FEASIBILITY_TOL, side="left")
        hi = np.searchsorted(tpr_b_sorted, tpr_a[i] + EO_FEASIBILITY_TOL, side="right")
        if lo >= hi:
            continue
        window = order_b[lo:hi]
        if criterion == "odds":
            window = window[np.abs(fpr_b[window] - fpr_a[i]) <= EO_FEASIBILITY_TOL]
            if window.size == 0:
                continue
        j = window[np.argmax(correct_b[window])]
        total = float(correct_a[i] + correct_b[j])
        if total > best_total:
            best_total = total
            best_pair = (int(i), int(j))

    if best_pair is None:
        # keep_pos == flip_neg makes both mixed rates equal, so the feasible
        # set is never empty; reaching this would be a bug.
        raise RuntimeError("no feasible mixing found")
    i, j = best_pair
    mix = {
        a: (float(keep_a[i]), float(flip_a[i])),
        b: (float(keep_b[j]), float(flip_b[j])),
    }
    kind = MitigationKind.EO_ODDS if criterion == "odds" else MitigationKind.EO_OPP
    return PairContext(
        kind=kind, pair=SubgroupPair(a, b), deprived=deprived, params={"mix": mix}
    )


def eo_eval_batch(
    ctx: PairContext,
    plain_model: LogisticModel,
    features: np.ndarray,
    key: SubgroupKey,
    draws: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Mixed predictions for rows of subgroup ``key`` using uniform draws.

    The class is sampled at the subgroup's mixing rate for the base
    prediction; the probability side is the plain model's score, which keeps
    the blended instance score continuous so downstream thresholds can be
    tuned finely (the mixing rates alone take only a handful of values).
    """
    if key not in ctx.pair:
        raise KeyError(f"subgroup {key!r} is not a member of {ctx.pair}")
    keep_pos, flip_neg = ctx.params["mix"][key]
    probas = plain_model.proba_matrix(features)
    flip_chance = np.where(probas > 0.5, keep_pos, flip_neg)
    draws = np.asarray(draws, dtype=np.float64)
    if draws.shape != flip_chance.shape:
        raise ValueError(f"need {flip_chance.shape} draws, got {draws.shape}")
    votes = (draws < flip_chance).astype(np.int8)
    return votes, probas


def uniform_draws(seed: int, count: int) -> np.ndarray:
    """Reproducible uniforms in [0, 1); position i is the draw for row i."""
    return np.random.default_rng(seed).random(count)


def eo_eval(
    instance: Instance,
    ctx: PairContext,
    plain_model: LogisticModel,
    seed: int,
    index: int = 0,
) -> tuple[int, float]:
    """Single-instance mixing draw, keyed by (seed, row index)."""
    draw = uniform_draws(seed, index + 1)[index:]
    votes, probas = eo_eval_batch(
        ctx, plain_model, instance.features[None, :], instance.sensitive, draw
    )
    return int(votes[0]), float(probas[0])


# ---------------------------------------------------------------------------
# Fair-regularized logistic regression (in-processing)
# ---------------------------------------------------------------------------


def fair_lr_fit(
    pair_train: Dataset,
    config: TrainConfig = TrainConfig(),
    fairness_weight: float = 100.0,
) -> PairContext:
    """Train the in-processing model for one pair; see fit_fair_regularized."""
    a, b = _pair_groups(pair_train)
    model = fit_fair_regularized(pair_train, config, fairness_weight)
    return PairContext(
        kind=MitigationKind.FAIR_LR,
        pair=SubgroupPair(a, b),
        deprived=deprived_subgroup(pair_train),
        params={"model": model, "fairness_weight": float(fairness_weight)},
    )


def fair_lr_eval_batch(
    ctx: PairContext, features: np.ndarray, key: SubgroupKey
) -> tuple[np.ndarray, np.ndarray]:
    if key not in ctx.pair:
        raise KeyError(f"subgroup {key!r} is not a member of {ctx.pair}")
    probas = ctx.params["model"].proba_matrix(features)
    return (probas > 0.5).astype(np.int8), probas


def fair_lr_eval(instance: Instance, ctx: PairContext) -> tuple[int, float]:
    votes, probas = fair_lr_eval_batch(ctx, instance.features[None, :], instance.sensitive)
    return int(votes[0]), float(probas[0])
