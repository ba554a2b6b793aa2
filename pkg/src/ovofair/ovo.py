"""Pairwise mitigation core: instance scoring, constrained threshold search,
and the pre-/in-/post-processing pipeline orchestrations.

Each instance is scored by aggregating the mitigated predictions of every
subgroup pair containing its subgroup: the favorable-vote ratio and the mean
predicted probability are blended with a vote-dominant weight, and the final
class comes from a per-subgroup score threshold. Thresholds are searched on
training scores to maximize balanced accuracy subject to a disparity cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from . import metrics
from .classifier import LogisticModel, TrainConfig, fit
from .metrics import Criterion, DisparityForm, MetricSpec
from .mitigators import (
    DEFAULT_ROC_WIDTH_GRID,
    MitigationKind,
    PairContext,
    eo_eval_batch,
    eo_fit,
    fair_lr_eval_batch,
    fair_lr_fit,
    massaging_fit,
    roc_eval_batch,
    roc_fit,
    uniform_draws,
)
from .model import (
    Dataset,
    SubgroupKey,
    SubgroupPair,
    enumerate_pairs,
    enumerate_subgroups,
    pair_subset_indices,
    pairs_for_subgroup,
)

EXHAUSTIVE_COMBO_LIMIT = 10_000_000

# Score threshold per subgroup; favorable iff score strictly exceeds it.
ThresholdMap = dict[SubgroupKey, float]


class Score(NamedTuple):
    vote_ratio: float
    mean_proba: float
    score: float


@dataclass(frozen=True)
class ScoredInstance:
    subgroup: SubgroupKey
    vote_ratio: float
    mean_proba: float
    score: float
    true_class: int


@dataclass(frozen=True)
class SearchConfig:
    epsilon: float = 0.03
    metric: MetricSpec = MetricSpec(Criterion.DEMOGRAPHIC_PARITY)
    grid_quantiles: int = 256
    strategy: str = "auto"  # auto | exhaustive | coordinate_ascent
    restarts: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.grid_quantiles < 2:
            raise ValueError("grid_quantiles must be at least 2")
        if self.strategy not in ("auto", "exhaustive", "coordinate_ascent"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class SearchResult:
    thresholds: ThresholdMap
    balanced_accuracy: float
    gamma: float
    feasible: bool


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs shared by the three pipeline orchestrations."""

    search: SearchConfig = SearchConfig()
    train: TrainConfig = TrainConfig()
    fairness_weight: float = 100.0
    roc_width_grid: tuple[float, ...] = DEFAULT_ROC_WIDTH_GRID
    seed: int = 0


def vote_weight(num_subgroups: int) -> float:
    """Blend weight making one vote outweigh the whole probability term."""
    if num_subgroups < 2:
        raise ValueError("need at least 2 subgroups")
    return (num_subgroups - 1) / num_subgroups


def score_instance(
    votes: Sequence[int], probas: Sequence[float], num_subgroups: int
) -> Score:
    """Blend one instance's pairwise votes and probabilities into its score.

    There is one vote and one probability per pair containing the instance's
    subgroup, i.e. num_subgroups - 1 of each.
    """
    if num_subgroups < 2:
        raise ValueError("need at least 2 subgroups")
    k = num_subgroups - 1
    if len(votes) != k or len(probas) != k:
        raise ValueError(
            f"expected {k} votes and probabilities, got {len(votes)}/{len(probas)}"
        )
    probas_arr = np.asarray(probas, dtype=np.float64)
    if probas_arr.min() < 0.0 or probas_arr.max() > 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    vote_ratio = sum(1 for v in votes if int(v) == 1) / k
    mean_proba = float(probas_arr.mean())
    w = vote_weight(num_subgroups)
    return Score(vote_ratio, mean_proba, w * vote_ratio + (1.0 - w) * mean_proba)


def apply_thresholds(
    scored: Sequence[ScoredInstance], theta: Mapping[SubgroupKey, float]
) -> np.ndarray:
    """Favorable iff the score strictly exceeds the subgroup's threshold."""
    out = np.empty(len(scored), dtype=np.int8)
    for i, s in enumerate(scored):
        if s.subgroup not in theta:
            raise KeyError(f"no threshold for subgroup {s.subgroup!r}")
        out[i] = 1 if s.score > theta[s.subgroup] else 0
    return out


# ---------------------------------------------------------------------------
# Threshold search
# ---------------------------------------------------------------------------


@dataclass
class _GroupTable:
    """Per-subgroup candidate thresholds with prefix-sum confusion counts."""

    key: SubgroupKey
    candidates: np.ndarray  # ascending thresholds
    tp: np.ndarray  # favorable-vote true positives per candidate
    fp: np.ndarray
    pos: int
    neg: int
    defined: bool  # criterion defined for this subgroup (static in counts)


def _build_tables(
    scored: Sequence[ScoredInstance], criterion: Criterion, grid_quantiles: int
) -> list[_GroupTable]:
    by_group: dict[SubgroupKey, list[ScoredInstance]] = {}
    for s in scored:
        by_group.setdefault(s.subgroup, []).append(s)

    tables = []
    for key in sorted(by_group):
        rows = by_group[key]
        t = np.array([r.score for r in rows])
        y = np.array([r.true_class for r in rows], dtype=np.int8)
        order = np.argsort(t, kind="stable")
        t, y = t[order], y[order]

        distinct = np.unique(t)
        mids = (distinct[:-1] + distinct[1:]) / 2.0
        if mids.size > grid_quantiles:
            pick = np.unique(
                np.round(np.linspace(0, mids.size - 1, grid_quantiles)).astype(int)
            )
            mids = mids[pick]
        low = distinct[0] / 2.0 if distinct[0] > 0.0 else 0.0
        candidates = np.unique(np.concatenate([[low], mids, [1.0]]))

        # suffix counts: instances with score > threshold
        pos_suffix = np.concatenate([np.cumsum((y == 1)[::-1])[::-1], [0]])
        starts = np.searchsorted(t, candidates, side="right")
        tp = pos_suffix[starts]
        predicted_pos = t.size - starts
        fp = predicted_pos - tp

        pos = int((y == 1).sum())
        neg = int(y.size - pos)
        if criterion is Criterion.EQUAL_OPPORTUNITY:
            defined = pos > 0
        elif criterion is Criterion.EQUALIZED_ODDS:
            defined = pos > 0 and neg > 0
        else:
            defined = True
        tables.append(
            _GroupTable(
                key=key,
                candidates=candidates,
                tp=tp.astype(np.int64),
                fp=fp.astype(np.int64),
                pos=pos,
                neg=neg,
                defined=defined,
            )
        )
    return tables


def _value_arrays(
    tp: np.ndarray, fp: np.ndarray, pos: int, neg: int, n: int, criterion: Criterion
) -> np.ndarray:
    if criterion is Criterion.DEMOGRAPHIC_PARITY:
        return (tp + fp) / n
    if criterion is Criterion.EQUAL_OPPORTUNITY:
        return tp / pos
    return (tp / pos + fp / neg) / 2


def _ratio_terms(overall: np.ndarray, value: np.ndarray) -> np.ndarray:
    # Matches metrics.gamma_ratio, including the degenerate-zero rules.
    overall, value = np.broadcast_arrays(overall, value)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = 1.0 - np.minimum(value / overall, overall / value)
    both_zero = (overall == 0.0) & (value == 0.0)
    one_zero = ((overall == 0.0) | (value == 0.0)) & ~both_zero
    return np.where(both_zero, 0.0, np.where(one_zero, 1.0, ratio))


class _Evaluator:
    """Evaluates candidate-index combinations over the group tables."""

    def __init__(self, tables: list[_GroupTable], spec: MetricSpec):
        self.tables = tables
        self.spec = spec
        self.pos_total = sum(t.pos for t in tables)
        self.neg_total = sum(t.neg for t in tables)
        self.n_total = sum(t.pos + t.neg for t in tables)
        if self.pos_total == 0 or self.neg_total == 0:
            raise ValueError("threshold search needs both truth classes present")

    def _overall(self, tp_total, fp_total) -> np.ndarray:
        return _value_arrays(
            tp_total, fp_total, self.pos_total, self.neg_total, self.n_total,
            self.spec.criterion,
        )

    def _gamma(self, overall, group_values: list) -> np.ndarray:
        """Worst deviation over subgroups; undefined subgroups carry None."""
        gamma = np.zeros_like(np.asarray(overall, dtype=np.float64))
        for v in group_values:
            if v is None:
                continue
            if self.spec.disparity_form is DisparityForm.DIFFERENCE:
                term = np.abs(overall - v)
            else:
                term = _ratio_terms(overall, v)
            gamma = np.maximum(gamma, term)
        return gamma

    def state_stats(self, state: Sequence[int]) -> tuple[float, float]:
        """(balanced accuracy, gamma) of one candidate-index combination."""
        tp = sum(int(t.tp[i]) for t, i in zip(self.tables, state))
        fp = sum(int(t.fp[i]) for t, i in zip(self.tables, state))
        overall = metrics.value_from_counts(
            tp, fp, self.pos_total, self.neg_total, self.spec.criterion
        )
        per_group = {
            t.key: metrics.value_from_counts(
                int(t.tp[i]), int(t.fp[i]), t.pos, t.neg, self.spec.criterion
            )
            for t, i in zip(self.tables, state)
            if t.defined
        }
        if self.spec.disparity_form is DisparityForm.DIFFERENCE:
            gamma = metrics.gamma_diff(overall, per_group)
        else:
            gamma = metrics.gamma_ratio(overall, per_group)
        acc = (tp / self.pos_total + (self.neg_total - fp) / self.neg_total) / 2
        return acc, gamma

    def axis_stats(
        self, state: Sequence[int], axis: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """(accuracy, gamma) arrays over all candidates of one subgroup,
        holding the other subgroups at their current candidates."""
        tab = self.tables[axis]
        tp_rest = sum(int(t.tp[i]) for k, (t, i) in enumerate(zip(self.tables, state)) if k != axis)
        fp_rest = sum(int(t.fp[i]) for k, (t, i) in enumerate(zip(self.tables, state)) if k != axis)
        tp_total = tab.tp + tp_rest
        fp_total = tab.fp + fp_rest
        overall = self._overall(tp_total, fp_total)
        values = []
        for k, (t, i) in enumerate(zip(self.tables, state)):
            if not t.defined:
                values.append(None)
            elif k == axis:
                values.append(_value_arrays(t.tp, t.fp, t.pos, t.neg, t.pos + t.neg, self.spec.criterion))
            else:
                values.append(
                    _value_arrays(
                        np.asarray(float(t.tp[i])), np.asarray(float(t.fp[i])),
                        t.pos, t.neg, t.pos + t.neg, self.spec.criterion,
                    )
                )
        gamma = self._gamma(overall, values)
        acc = (tp_total / self.pos_total + (self.neg_total - fp_total) / self.neg_total) / 2
        return acc, gamma


def _selection_key(feasible: bool, acc: float, gamma: float) -> tuple:
    # Feasible states maximize accuracy (then lower gamma); infeasible states
    # minimize gamma (then higher accuracy), yielding the best-effort result.
    if feasible:
        return (1, acc, -gamma)
    return (0, -gamma, acc)


def _search_exhaustive(ev: _Evaluator, epsilon: float) -> tuple[list[int], bool]:
    tables = ev.tables
    shape = tuple(len(t.candidates) for t in tables)

    def spread(arr: np.ndarray, axis: int) -> np.ndarray:
        target = [1] * len(shape)
        target[axis] = shape[axis]
        return arr.reshape(target)

    tp_total = sum(spread(t.tp, i) for i, t in enumerate(tables))
    fp_total = sum(spread(t.fp, i) for i, t in enumerate(tables))
    overall = ev._overall(tp_total, fp_total)
    values = [
        spread(
            _value_arrays(t.tp, t.fp, t.pos, t.neg, t.pos + t.neg, ev.spec.criterion), i
        )
        if t.defined
        else None
        for i, t in enumerate(tables)
    ]
    gamma = ev._gamma(overall, values)
    acc = (tp_total / ev.pos_total + (ev.neg_total - fp_total) / ev.neg_total) / 2

    feasible_mask = gamma < epsilon
    if feasible_mask.any():
        acc_feasible = np.where(feasible_mask, acc, -np.inf)
        best_acc = acc_feasible.max()
        tie = acc_feasible == best_acc
        gamma_tie = np.where(tie, gamma, np.inf)
        flat = int(np.argmin(gamma_tie))  # first index among min-gamma ties
        return list(np.unravel_index(flat, shape)), True
    gamma_min = gamma.min()
    tie = gamma == gamma_min
    acc_tie = np.where(tie, acc, -np.inf)
    flat = int(np.argmax(acc_tie))
    return list(np.unravel_index(flat, shape)), False


def _search_coordinate_ascent(
    ev: _Evaluator, epsilon: float, restarts: int, seed: int
) -> tuple[list[int], bool]:
    tables = ev.tables
    rng = np.random.default_rng(seed)

    # Greedy start: each subgroup's unconstrained best-accuracy candidate.
    greedy = [
        int(np.argmax(t.tp / ev.pos_total - t.fp / ev.neg_total)) for t in tables
    ]
    starts = [greedy] + [
        [int(rng.integers(len(t.candidates))) for t in tables] for _ in range(restarts)
    ]

    best_state = None
    best_key = None
    for state in starts:
        state = list(state)
        for _ in range(100):
            changed = False
            for axis in range(len(tables)):
                acc_arr, gamma_arr = ev.axis_stats(state, axis)
                feas_arr = gamma_arr < epsilon
                idx_best = max(
                    range(len(acc_arr)),
                    key=lambda i: (
                        _selection_key(bool(feas_arr[i]), float(acc_arr[i]), float(gamma_arr[i])),
                        -i,
                    ),
                )
                if idx_best != state[axis]:
                    state[axis] = idx_best
                    changed = True
            if not changed:
                break
        acc, gamma = ev.state_stats(state)
        key = _selection_key(gamma < epsilon, acc, gamma)
        if best_key is None or key > best_key:
            best_key = key
            best_state = list(state)
    return best_state, best_key[0] == 1


def search_thresholds(
    scored_train: Sequence[ScoredInstance], config: SearchConfig
) -> SearchResult:
    """Per-subgroup thresholds maximizing balanced accuracy under gamma < epsilon.

    Candidates per subgroup are the midpoints between consecutive distinct
    scores (quantile-subsampled to grid_quantiles when more), plus a
    below-minimum sentinel and 1.0. If no combination satisfies the cap, the
    gamma-minimizing combination is returned with feasible=False.
    """
    if len(scored_train) == 0:
        raise ValueError("no scored instances to search over")
    tables = _build_tables(scored_train, config.metric.criterion, config.grid_quantiles)
    ev = _Evaluator(tables, config.metric)

    combos = 1
    for t in tables:
        combos *= len(t.candidates)
    strategy = config.strategy
    if strategy == "auto":
        strategy = "exhaustive" if combos <= EXHAUSTIVE_COMBO_LIMIT else "coordinate_ascent"

    if strategy == "exhaustive":
        state, feasible = _search_exhaustive(ev, config.epsilon)
    else:
        state, feasible = _search_coordinate_ascent(
            ev, config.epsilon, config.restarts, config.seed
        )

    acc, gamma = ev.state_stats(state)
    thresholds = {
        t.key: float(t.candidates[i]) for t, i in zip(tables, state)
    }
    return SearchResult(
        thresholds=thresholds,
        balanced_accuracy=acc,
        gamma=gamma,
        feasible=feasible,
    )


# ---------------------------------------------------------------------------
# Pipeline orchestration
# ---------------------------------------------------------------------------


@dataclass
class PairFits:
    """Everything fitted on the training split, before threshold search."""

    method: MitigationKind
    subgroups: list[SubgroupKey]
    pairs: list[SubgroupPair]
    plain: LogisticModel | None
    contexts: dict[SubgroupPair, PairContext]
    relabeled: dict[SubgroupPair, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class PreprocessResult:
    mitigated: Dataset
    model: LogisticModel
    search: SearchResult


@dataclass(frozen=True)
class PredictResult:
    labels: np.ndarray
    search: SearchResult


def _group_rows(dataset: Dataset, subgroups: Sequence[SubgroupKey]) -> dict[SubgroupKey, np.ndarray]:
    rows: dict[SubgroupKey, list[int]] = {key: [] for key in subgroups}
    for i, key in enumerate(dataset.sensitive_rows):
        if key not in rows:
            raise KeyError(f"subgroup {key!r} not present in training data")
        rows[key].append(i)
    return {k: np.asarray(v, dtype=np.int64) for k, v in rows.items() if v}


def _blend_scores(
    dataset: Dataset,
    subgroups: Sequence[SubgroupKey],
    pairs: Sequence[SubgroupPair],
    block_eval: Callable[[SubgroupPair, SubgroupKey, np.ndarray], tuple[np.ndarray, np.ndarray]],
) -> list[ScoredInstance]:
    """Score every instance through the pairs containing its subgroup."""
    n = len(dataset)
    k = len(subgroups) - 1
    w = vote_weight(len(subgroups))
    vote_sum = np.zeros(n)
    proba_sum = np.zeros(n)
    for key, rows in _group_rows(dataset, subgroups).items():
        for pair in pairs_for_subgroup(pairs, key):
            votes, probas = block_eval(pair, key, rows)
            vote_sum[rows] += votes
            proba_sum[rows] += probas
    vote_ratio = vote_sum / k
    mean_proba = proba_sum / k
    score = w * vote_ratio + (1.0 - w) * mean_proba
    return [
        ScoredInstance(
            subgroup=dataset.sensitive_rows[i],
            vote_ratio=float(vote_ratio[i]),
            mean_proba=float(mean_proba[i]),
            score=float(score[i]),
            true_class=int(dataset.labels[i]),
        )
        for i in range(n)
    ]


def fit_pair_mitigators(
    train: Dataset, method: MitigationKind, config: PipelineConfig
) -> PairFits:
    """Fit the per-pair mitigation state (and plain model where needed)."""
    subgroups = enumerate_subgroups(train)
    pairs = enumerate_pairs(subgroups)
    plain = None
    if method in (MitigationKind.ROC, MitigationKind.EO_ODDS, MitigationKind.EO_OPP):
        plain = fit(train, config.train)

    contexts: dict[SubgroupPair, PairContext] = {}
    relabeled: dict[SubgroupPair, np.ndarray] = {}
    for pair in pairs:
        idx = pair_subset_indices(train, pair)
        subset = train.select(idx)
        try:
            if method is MitigationKind.MS:
                subset_new, ctx = massaging_fit(subset, config.train)
                full = np.full(len(train), -1, dtype=np.int8)
                full[idx] = subset_new.labels
                relabeled[pair] = full
            elif method is MitigationKind.FAIR_LR:
                ctx = fair_lr_fit(subset, config.train, config.fairness_weight)
            elif method is MitigationKind.ROC:
                ctx = roc_fit(plain, subset, config.roc_width_grid)
            elif method is MitigationKind.EO_ODDS:
                ctx = eo_fit(plain, subset, "odds")
            elif method is MitigationKind.EO_OPP:
                ctx = eo_fit(plain, subset, "opportunity")
            else:
                raise ValueError(f"unknown mitigation kind {method!r}")
        except ValueError as exc:
            raise ValueError(f"cannot fit pair {pair}: {exc}") from exc
        contexts[pair] = ctx
    return PairFits(
        method=method,
        subgroups=subgroups,
        pairs=pairs,
        plain=plain,
        contexts=contexts,
        relabeled=relabeled,
    )


def score_dataset(
    fits: PairFits, dataset: Dataset, config: PipelineConfig, split_tag: int
) -> list[ScoredInstance]:
    """Blend pairwise mitigated predictions into per-instance scores.

    split_tag keys the randomized draws of the equalized-odds mixers so that
    training and test draws are independent but reproducible.
    """
    method = fits.method
    pair_index = {pair: i for i, pair in enumerate(fits.pairs)}
    draw_cache: dict[SubgroupPair, np.ndarray] = {}

    def draws_for(pair: SubgroupPair) -> np.ndarray:
        if pair not in draw_cache:
            draw_cache[pair] = uniform_draws(
                [config.seed, split_tag, pair_index[pair]], len(dataset)
            )
        return draw_cache[pair]

    def block_eval(pair: SubgroupPair, key: SubgroupKey, rows: np.ndarray):
        ctx = fits.contexts[pair]
        features = dataset.features[rows]
        if method is MitigationKind.MS:
            labels = fits.relabeled[pair][rows]
            if np.any(labels < 0):
                raise ValueError("massaging can only score the training split")
            return labels.astype(np.int8), np.zeros(len(rows))
        if method is MitigationKind.FAIR_LR:
            return fair_lr_eval_batch(ctx, features, key)
        if method is MitigationKind.ROC:
            return roc_eval_batch(ctx, fits.plain, features, key)
        return eo_eval_batch(ctx, fits.plain, features, key, draws_for(pair)[rows])

    return _blend_scores(dataset, fits.subgroups, fits.pairs, block_eval)


def refit_on_mitigated(mitigated: Dataset, config: TrainConfig) -> LogisticModel:
    """Plain model on the relabeled data; constant model if one class is left.

    A tight disparity cap can make the thresholded relabeling single-class
    (e.g. everything unfavorable); logistic regression on that has no
    finite optimum, so the equivalent saturated constant model is returned.
    """
    labels = mitigated.labels
    if labels.min() == labels.max():
        m = mitigated.feature_dim
        return LogisticModel(
            weights=np.zeros(m),
            bias=30.0 if int(labels[0]) == 1 else -30.0,
            feature_means=np.zeros(m),
            feature_scales=np.ones(m),
        )
    return fit(mitigated, config)


def _search_config_for(method: MitigationKind, config: PipelineConfig) -> SearchConfig:
    # Massaging only supports demographic parity, so its threshold search is
    # always constrained on that criterion whatever the reporting metric.
    if method is MitigationKind.MS:
        return replace(
            config.search,
            metric=MetricSpec(
                Criterion.DEMOGRAPHIC_PARITY, config.search.metric.disparity_form
            ),
        )
    return config.search


def run_preprocessing(
    train: Dataset,
    config: PipelineConfig,
    method: MitigationKind = MitigationKind.MS,
) -> PreprocessResult:
    """Relabel the training data pairwise, then retrain a plain classifier.

    Every training instance is scored through its pairs' massaged labels,
    thresholds are searched on those scores, and the thresholded classes
    become the new labels of the mitigated dataset.
    """
    if method is not MitigationKind.MS:
        raise ValueError(f"pre-processing supports MS only, got {method}")
    fits = fit_pair_mitigators(train, method, config)
    scored = score_dataset(fits, train, config, split_tag=0)
    search = search_thresholds(scored, _search_config_for(method, config))
    new_labels = apply_thresholds(scored, search.thresholds)
    mitigated = train.with_labels(new_labels, determined=new_labels)
    model = refit_on_mitigated(mitigated, config.train)
    return PreprocessResult(mitigated=mitigated, model=model, search=search)


def run_inprocessing(
    train: Dataset,
    test_set: Dataset,
    config: PipelineConfig,
    method: MitigationKind = MitigationKind.FAIR_LR,
) -> PredictResult:
    """Fit one fairness-regularized model per pair; threshold test scores."""
    if method is not MitigationKind.FAIR_LR:
        raise ValueError(f"in-processing supports FAIR_LR only, got {method}")
    fits = fit_pair_mitigators(train, method, config)
    scored_train = score_dataset(fits, train, config, split_tag=0)
    search = search_thresholds(scored_train, _search_config_for(method, config))
    scored_test = score_dataset(fits, test_set, config, split_tag=1)
    return PredictResult(
        labels=apply_thresholds(scored_test, search.thresholds), search=search
    )


def run_postprocessing(
    train: Dataset,
    test_set: Dataset,
    method: MitigationKind,
    config: PipelineConfig,
) -> PredictResult:
    """One plain model plus one mitigation context per pair; threshold test scores."""
    if method not in (MitigationKind.ROC, MitigationKind.EO_ODDS, MitigationKind.EO_OPP):
        raise ValueError(f"post-processing supports ROC/EO_ODDS/EO_OPP, got {method}")
    fits = fit_pair_mitigators(train, method, config)
    scored_train = score_dataset(fits, train, config, split_tag=0)
    search = search_thresholds(scored_train, _search_config_for(method, config))
    scored_test = score_dataset(fits, test_set, config, split_tag=1)
    return PredictResult(
        labels=apply_thresholds(scored_test, search.thresholds), search=search
    )
