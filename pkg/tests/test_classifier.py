import numpy as np
import pytest

from ovofair.classifier import (
    LogisticModel,
    TrainConfig,
    fair_objective,
    fit,
    fit_fair_regularized,
    plain_objective,
    predict,
    predict_matrix,
    predict_proba,
    _minimize,
)

from conftest import make_dataset
from oracles import finite_difference_gradient


def separable_dataset():
    rng = np.random.default_rng(1)
    x_pos = rng.normal(2.0, 0.3, (10, 2))
    x_neg = rng.normal(-2.0, 0.3, (10, 2))
    features = np.vstack([x_pos, x_neg])
    labels = np.array([1] * 10 + [0] * 10)
    return make_dataset([("a",)] * 20, labels, features=features)


class TestFit:
    def test_separable_toy_perfect_accuracy(self):
        ds = separable_dataset()
        model = fit(ds, TrainConfig(l2_strength=0.01))
        preds = predict_matrix(model, ds.features)
        assert np.array_equal(preds, ds.labels)

    def test_feature_free_balanced_data_gives_half(self):
        ds = make_dataset(
            [("a",)] * 10, [1, 0] * 5, features=np.zeros((10, 1))
        )
        model = fit(ds)
        probas = model.proba_matrix(ds.features)
        assert np.allclose(probas, 0.5, atol=1e-6)

    def test_single_class_rejected(self):
        ds = make_dataset([("a",)] * 4, [1, 1, 1, 1])
        with pytest.raises(ValueError):
            fit(ds)

    def test_deterministic(self):
        ds = separable_dataset()
        m1 = fit(ds)
        m2 = fit(ds)
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias

    def test_loss_decreases_monotonically(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((30, 3))
        y = (x[:, 0] + 0.3 * rng.standard_normal(30) > 0).astype(float)
        _, history = _minimize(plain_objective(x, y, 0.05), 4, TrainConfig())
        assert all(b <= a for a, b in zip(history, history[1:]))
        assert len(history) > 2


class TestGradients:
    def test_plain_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((5, 3))
        y = rng.integers(0, 2, 5).astype(float)
        objective = plain_objective(x, y, 0.3)
        params = rng.standard_normal(4)
        analytic = objective(params)[1]
        numeric = finite_difference_gradient(objective, params)
        assert np.max(np.abs(analytic - numeric)) < 1e-5

    def test_fair_penalty_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((8, 3))
        y = rng.integers(0, 2, 8).astype(float)
        mask = np.array([True] * 4 + [False] * 4)
        objective = fair_objective(x, y, 0.2, mask, fairness_weight=5.0)
        params = rng.standard_normal(4)
        analytic = objective(params)[1]
        numeric = finite_difference_gradient(objective, params)
        assert np.max(np.abs(analytic - numeric)) < 1e-5


class TestPredict:
    def _identity_model(self, weights, bias):
        m = len(weights)
        return LogisticModel(
            weights=np.asarray(weights, dtype=float),
            bias=bias,
            feature_means=np.zeros(m),
            feature_scales=np.ones(m),
        )

    def test_zero_model_gives_half(self):
        model = self._identity_model([0.0, 0.0], 0.0)
        assert predict_proba(model, np.array([3.0, -1.0])) == 0.5

    def test_large_bias_saturates(self):
        model = self._identity_model([0.0], 20.0)
        p = predict_proba(model, np.array([0.0]))
        assert p > 0.999
        assert p < 1.0

    def test_hand_computed_case(self):
        model = self._identity_model([1.0, -1.0], 0.0)
        p = predict_proba(model, np.array([2.0, 1.0]))
        assert p == pytest.approx(1 / (1 + np.exp(-1.0)), abs=1e-12)

    def test_probability_strictly_inside_unit_interval(self):
        model = self._identity_model([100.0], 0.0)
        assert 0.0 < predict_proba(model, np.array([-50.0])) < 1.0
        assert 0.0 < predict_proba(model, np.array([50.0])) < 1.0

    def test_cutoff_is_strict(self):
        model = self._identity_model([0.0], 0.0)  # proba exactly 0.5
        x = np.array([1.0])
        assert predict(model, x, cutoff=0.5) == 0
        assert predict(model, x, cutoff=0.4) == 1
        assert predict(model, x, cutoff=0.0) == 1

    def test_dimension_mismatch_rejected(self):
        model = self._identity_model([1.0, 2.0], 0.0)
        with pytest.raises(ValueError):
            predict_proba(model, np.array([1.0]))

    def test_serialization_roundtrip(self):
        ds = separable_dataset()
        model = fit(ds)
        clone = LogisticModel.from_dict(model.to_dict())
        assert np.array_equal(clone.weights, model.weights)
        assert clone.bias == model.bias
        assert np.array_equal(clone.proba_matrix(ds.features), model.proba_matrix(ds.features))


class TestFairRegularized:
    def _pair(self):
        rng = np.random.default_rng(12)
        # group a skews positive, group b negative; features track the class
        labels = np.concatenate([rng.random(60) < 0.8, rng.random(60) < 0.2]).astype(int)
        shift = np.where(labels == 1, 1.0, -1.0)[:, None]
        features = shift + 0.6 * rng.standard_normal((120, 2))
        return make_dataset([("a",)] * 60 + [("b",)] * 60, labels, features=features)

    def test_zero_weight_reduces_to_plain_fit(self):
        ds = self._pair()
        plain = fit(ds)
        fair = fit_fair_regularized(ds, fairness_weight=0.0)
        assert np.max(np.abs(plain.weights - fair.weights)) < 1e-8
        assert abs(plain.bias - fair.bias) < 1e-8

    def test_large_weight_closes_probability_gap(self):
        ds = self._pair()
        mask = ds.subgroup_mask(("a",))
        plain = fit(ds)
        plain_gap = abs(
            plain.proba_matrix(ds.features)[mask].mean()
            - plain.proba_matrix(ds.features)[~mask].mean()
        )
        fair = fit_fair_regularized(ds, fairness_weight=1e3)
        probas = fair.proba_matrix(ds.features)
        gap = abs(probas[mask].mean() - probas[~mask].mean())
        assert plain_gap > 0.3
        assert gap < 0.02

    def test_probabilities_in_open_interval(self):
        ds = self._pair()
        model = fit_fair_regularized(ds, fairness_weight=10.0)
        probas = model.proba_matrix(ds.features)
        assert probas.min() > 0.0
        assert probas.max() < 1.0

    def test_requires_exactly_two_subgroups(self):
        ds = make_dataset([("a",), ("b",), ("c",), ("a",)], [1, 0, 1, 0])
        with pytest.raises(ValueError):
            fit_fair_regularized(ds, fairness_weight=1.0)
