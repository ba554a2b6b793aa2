"""Module invariants exercised on seeded synthetic data only.

This suite must pass with zero dataset files present: score bounds, vote
dominance, partition and pair-count identities, massaging label
conservation, search feasibility, and determinism.
"""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ovofair.classifier import TrainConfig, fit
from ovofair.datasets import SyntheticSpec, generate_synthetic, kfold_split
from ovofair.metrics import Criterion, DisparityForm, MetricSpec, disparity
from ovofair.mitigators import MitigationKind, massaging_fit
from ovofair.model import enumerate_pairs, enumerate_subgroups, pairs_for_subgroup
from ovofair.ovo import (
    PipelineConfig,
    ScoredInstance,
    SearchConfig,
    apply_thresholds,
    fit_pair_mitigators,
    score_dataset,
    score_instance,
    search_thresholds,
)


def seeded_dataset(seed=0, sizes=(80, 60, 50, 40)):
    keys = [("w", "m"), ("w", "f"), ("n", "m"), ("n", "f")]
    return generate_synthetic(
        SyntheticSpec(
            subgroup_sizes=dict(zip(keys, sizes)),
            positive_rates={
                ("w", "m"): 0.7, ("w", "f"): 0.5, ("n", "m"): 0.4, ("n", "f"): 0.15,
            },
            noise_scale=0.8,
            seed=seed,
            group_shift={("n", "f"): -0.6},
        )
    )


@given(
    votes=st.lists(st.integers(0, 1), min_size=1, max_size=8),
    data=st.data(),
)
@settings(max_examples=200, deadline=None)
def test_score_bounds(votes, data):
    probas = data.draw(
        st.lists(
            st.floats(0.0, 1.0, allow_nan=False),
            min_size=len(votes),
            max_size=len(votes),
        )
    )
    parts = score_instance(votes, probas, num_subgroups=len(votes) + 1)
    assert 0.0 <= parts.score <= 1.0
    assert 0.0 <= parts.vote_ratio <= 1.0
    assert 0.0 <= parts.mean_proba <= 1.0


@given(
    k=st.integers(1, 6),
    seed=st.integers(0, 10_000),
)
@settings(max_examples=150, deadline=None)
def test_vote_dominance(k, seed):
    rng = np.random.default_rng(seed)
    a = score_instance(rng.integers(0, 2, k).tolist(), rng.random(k).tolist(), k + 1)
    b = score_instance(rng.integers(0, 2, k).tolist(), rng.random(k).tolist(), k + 1)
    if a.vote_ratio > b.vote_ratio:
        assert a.score >= b.score
    if a.vote_ratio == b.vote_ratio and a.mean_proba == b.mean_proba:
        assert a.score == b.score


def test_partition_and_pair_count_identities():
    for seed in range(5):
        ds = seeded_dataset(seed=seed)
        subgroups = enumerate_subgroups(ds)
        sizes = [int(ds.subgroup_mask(s).sum()) for s in subgroups]
        assert sum(sizes) == len(ds)
        pairs = enumerate_pairs(subgroups)
        k = len(subgroups)
        assert len(pairs) == k * (k - 1) // 2
        for s in subgroups:
            assert len(pairs_for_subgroup(pairs, s)) == k - 1


def test_massaging_conserves_favorable_count():
    for seed in range(6):
        ds = seeded_dataset(seed=seed, sizes=(60, 50, 0, 0))
        relabeled, ctx = massaging_fit(ds, TrainConfig(max_iterations=1500))
        assert int(relabeled.labels.sum()) == int(ds.labels.sum())
        swaps = ctx.params["swap_count"]
        assert len(ctx.params["promoted"]) == swaps
        assert len(ctx.params["demoted"]) == swaps


def test_fold_partition_multiset():
    ds = seeded_dataset(seed=3)
    splits = kfold_split(ds, 5, seed=4)
    seen = np.concatenate([s.test.features[:, 0] for s in splits])
    assert sorted(seen.tolist()) == sorted(ds.features[:, 0].tolist())
    for s in splits:
        assert len(s.train) + len(s.test) == len(ds)


def test_search_feasibility_reports_exact_gamma():
    rng = np.random.default_rng(17)
    for _ in range(20):
        n = int(rng.integers(12, 40))
        scored = []
        truths = rng.integers(0, 2, n)
        truths[:2] = [0, 1]
        for i in range(n):
            scored.append(
                ScoredInstance(
                    (f"g{i % 3}",), 0.0, 0.0, float(np.round(rng.random(), 2)), int(truths[i])
                )
            )
        for eps in (0.05, 0.3, 1.0):
            result = search_thresholds(
                scored, SearchConfig(epsilon=eps, metric=MetricSpec(Criterion.DEMOGRAPHIC_PARITY))
            )
            preds = apply_thresholds(scored, result.thresholds)
            report = disparity(
                preds,
                np.array([s.true_class for s in scored]),
                [s.subgroup for s in scored],
                MetricSpec(Criterion.DEMOGRAPHIC_PARITY),
            )
            assert report.gamma_diff == result.gamma
            if result.feasible:
                assert result.gamma < eps


def test_scores_bounded_for_all_methods():
    ds = seeded_dataset(seed=9)
    cfg = PipelineConfig(
        search=SearchConfig(), train=TrainConfig(max_iterations=1500), seed=5
    )
    for method in (MitigationKind.MS, MitigationKind.ROC, MitigationKind.EO_ODDS):
        fits = fit_pair_mitigators(ds, method, cfg)
        scored = score_dataset(fits, ds, cfg, split_tag=0)
        assert all(0.0 <= s.score <= 1.0 for s in scored)
        if method is MitigationKind.MS:
            assert all(s.mean_proba == 0.0 for s in scored)


def test_enumerations_and_fits_deterministic():
    a = seeded_dataset(seed=12)
    b = seeded_dataset(seed=12)
    assert enumerate_subgroups(a) == enumerate_subgroups(b)
    assert enumerate_pairs(enumerate_subgroups(a)) == enumerate_pairs(enumerate_subgroups(b))
    cfg = PipelineConfig(train=TrainConfig(max_iterations=1500), seed=3)
    fits_a = fit_pair_mitigators(a, MitigationKind.EO_ODDS, cfg)
    fits_b = fit_pair_mitigators(b, MitigationKind.EO_ODDS, cfg)
    for pair in fits_a.pairs:
        assert fits_a.contexts[pair].params == fits_b.contexts[pair].params
    scored_a = score_dataset(fits_a, a, cfg, split_tag=0)
    scored_b = score_dataset(fits_b, b, cfg, split_tag=0)
    assert scored_a == scored_b
    model_a = fit(a, TrainConfig(max_iterations=1500))
    model_b = fit(b, TrainConfig(max_iterations=1500))
    assert np.array_equal(model_a.weights, model_b.weights)


def test_ratio_and_difference_gamma_zero_iff_values_match_overall():
    ds = seeded_dataset(seed=20)
    preds = ds.labels  # perfect predictor: per-subgroup TPR/FPR are 1/0
    report = disparity(
        preds, ds.labels, ds.sensitive_rows,
        MetricSpec(Criterion.EQUAL_OPPORTUNITY, DisparityForm.RATIO),
    )
    assert report.gamma_diff == 0.0
    assert report.gamma_ratio == 0.0
