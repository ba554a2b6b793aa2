import os
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from ovofair.datasets import (
    DataFormatError,
    SyntheticSpec,
    generate_synthetic,
    kfold_split,
    load_adult,
    load_compas,
)
from ovofair.harness import adult_path, compas_path

FIXTURES = Path(__file__).parent / "data"
DATA_BASE = Path(os.environ.get("OVOFAIR_DATA", "data"))


class TestLoadAdult:
    def test_mini_fixture_counts(self):
        ds = load_adult(FIXTURES / "adult_mini")
        # 17 raw rows, 3 carry "?" and are dropped
        assert len(ds) == 14
        counts = Counter(ds.sensitive_rows)
        assert counts[("white", "male")] == 6
        assert counts[("white", "female")] == 2
        assert counts[("non-white", "male")] == 4
        assert counts[("non-white", "female")] == 2
        assert int(ds.labels.sum()) == 7

    def test_single_file_load(self):
        ds = load_adult(FIXTURES / "adult_mini" / "adult.data")
        assert len(ds) == 10

    def test_feature_schema_excludes_sensitive_label_and_weight(self):
        ds = load_adult(FIXTURES / "adult_mini")
        bases = {name.split("=")[0] for name in ds.feature_schema}
        assert bases == {
            "age", "workclass", "education", "education-num", "marital-status",
            "occupation", "relationship", "capital-gain", "capital-loss",
            "hours-per-week", "native-country",
        }
        assert len(bases) == 11

    def test_one_hot_exactly_one_indicator_per_row(self):
        ds = load_adult(FIXTURES / "adult_mini")
        for base in ("workclass", "education", "marital-status", "occupation",
                     "relationship", "native-country"):
            cols = [i for i, n in enumerate(ds.feature_schema) if n.startswith(f"{base}=")]
            assert np.all(ds.features[:, cols].sum(axis=1) == 1.0)

    def test_idempotent(self):
        a = load_adult(FIXTURES / "adult_mini")
        b = load_adult(FIXTURES / "adult_mini")
        assert a.feature_schema == b.feature_schema
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)
        assert a.sensitive_rows == b.sensitive_rows

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_adult(FIXTURES / "nope")

    def test_malformed_layout(self, tmp_path):
        bad = tmp_path / "adult.data"
        bad.write_text("1, 2, 3\n4, 5, 6\n")
        with pytest.raises((DataFormatError, KeyError, ValueError)):
            load_adult(bad)


class TestLoadCompas:
    def test_mini_fixture_counts(self):
        ds = load_compas(FIXTURES / "compas_mini.csv")
        # screening window, is_recid, charge degree, score and NaN filters
        # remove rows 4-8 except the two boundary rows
        assert len(ds) == 8
        counts = Counter(ds.sensitive_rows)
        assert counts[("white", "male")] == 2
        assert counts[("white", "female")] == 1
        assert counts[("non-white", "male")] == 3
        assert counts[("non-white", "female")] == 2
        # favorable = no recidivism within two years
        assert int(ds.labels.sum()) == 4

    def test_eight_nonsensitive_attributes(self):
        ds = load_compas(FIXTURES / "compas_mini.csv")
        bases = {name.split("=")[0] for name in ds.feature_schema}
        assert bases == {
            "age", "age_cat", "juv_fel_count", "juv_misd_count",
            "juv_other_count", "priors_count", "c_charge_degree", "c_charge_desc",
        }
        assert len(bases) == 8

    def test_missing_columns_rejected(self, tmp_path):
        bad = tmp_path / "compas-scores-two-years.csv"
        bad.write_text("sex,race\nMale,Other\n")
        with pytest.raises(DataFormatError):
            load_compas(bad)

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_compas(FIXTURES / "missing.csv")


@pytest.mark.skipif(
    not (adult_path(DATA_BASE) / "adult.data").exists(),
    reason="real Adult files not present (see README: data setup)",
)
class TestRealAdult:
    def test_reproduces_published_counts(self):
        ds = load_adult(adult_path(DATA_BASE))
        assert len(ds) == 45_222
        counts = Counter(ds.sensitive_rows)
        assert counts[("white", "male")] == 27_020
        assert counts[("white", "female")] == 11_883
        assert counts[("non-white", "male")] == 3_507
        assert counts[("non-white", "female")] == 2_812
        assert int(ds.labels.sum()) == 11_208

    def test_pair_subset_count(self):
        from ovofair.model import SubgroupPair, pair_subset

        ds = load_adult(adult_path(DATA_BASE))
        pair = SubgroupPair(("white", "male"), ("non-white", "female"))
        assert len(pair_subset(ds, pair)) == 29_832


@pytest.mark.skipif(
    not compas_path(DATA_BASE).exists(),
    reason="real COMPAS file not present (see README: data setup)",
)
class TestRealCompas:
    def test_reproduces_published_counts(self):
        ds = load_compas(compas_path(DATA_BASE))
        assert len(ds) == 6_167
        counts = Counter(ds.sensitive_rows)
        assert counts[("white", "male")] == 1_620
        assert counts[("white", "female")] == 480
        assert counts[("non-white", "male")] == 3_374
        assert counts[("non-white", "female")] == 693
        # favorable = no recidivism within two years
        assert int(ds.labels.sum()) == 3_358


class TestKFold:
    def _ds(self, n=10):
        from conftest import make_dataset

        rng = np.random.default_rng(0)
        return make_dataset([("a",)] * n, rng.integers(0, 2, n))

    def test_exact_division(self):
        splits = kfold_split(self._ds(10), 5, seed=1)
        assert len(splits) == 5
        assert all(len(s.test) == 2 for s in splits)
        assert all(len(s.train) == 8 for s in splits)

    def test_uneven_division_sizes(self):
        splits = kfold_split(self._ds(11), 5, seed=1)
        sizes = sorted(len(s.test) for s in splits)
        assert sizes == [2, 2, 2, 2, 3]

    def test_full_scale_fold_sizes(self):
        splits = kfold_split(self._ds(45_222), 5, seed=0)
        sizes = sorted(len(s.test) for s in splits)
        assert sizes == [9_044, 9_044, 9_044, 9_045, 9_045]
        assert all(len(s.train) + len(s.test) == 45_222 for s in splits)

    def test_partition(self):
        ds = self._ds(23)
        splits = kfold_split(ds, 4, seed=3)
        seen = []
        for s in splits:
            seen.extend(s.test.features[:, 0].tolist())
            # train and test are disjoint
            assert not set(s.train.features[:, 0]) & set(s.test.features[:, 0])
        assert Counter(seen) == Counter(ds.features[:, 0].tolist())

    def test_deterministic(self):
        ds = self._ds(20)
        a = kfold_split(ds, 5, seed=9)
        b = kfold_split(ds, 5, seed=9)
        for x, y in zip(a, b):
            assert np.array_equal(x.test.features, y.test.features)
        c = kfold_split(ds, 5, seed=10)
        assert any(
            not np.array_equal(x.test.features, y.test.features) for x, y in zip(a, c)
        )

    def test_bad_k(self):
        with pytest.raises(ValueError):
            kfold_split(self._ds(5), 6, seed=0)
        with pytest.raises(ValueError):
            kfold_split(self._ds(5), 1, seed=0)


class TestSynthetic:
    def test_exact_sizes_and_extreme_rates(self):
        spec = SyntheticSpec(
            subgroup_sizes={("a",): 100, ("b",): 100, ("c",): 100, ("d",): 100},
            positive_rates={("a",): 0.6, ("b",): 0.6, ("c",): 0.6, ("d",): 0.0},
            seed=5,
        )
        ds = generate_synthetic(spec)
        counts = Counter(ds.sensitive_rows)
        assert all(counts[k] == 100 for k in spec.subgroup_sizes)
        d_mask = ds.subgroup_mask(("d",))
        assert ds.labels[d_mask].sum() == 0

    def test_rate_one_all_positive(self):
        ds = generate_synthetic(
            SyntheticSpec(subgroup_sizes={("a",): 50}, positive_rates={("a",): 1.0})
        )
        assert ds.labels.sum() == 50

    def test_empirical_rate_concentration(self):
        n = 10_000
        rate = 0.37
        ds = generate_synthetic(
            SyntheticSpec(subgroup_sizes={("a",): n}, positive_rates={("a",): rate}, seed=2)
        )
        sigma = np.sqrt(rate * (1 - rate) / n)
        assert abs(ds.labels.mean() - rate) < 3 * sigma

    def test_deterministic(self):
        spec = SyntheticSpec(
            subgroup_sizes={("a",): 30, ("b",): 20},
            positive_rates={("a",): 0.5, ("b",): 0.3},
            seed=7,
        )
        a, b = generate_synthetic(spec), generate_synthetic(spec)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)

    def test_all_zero_sizes_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic(
                SyntheticSpec(subgroup_sizes={("a",): 0}, positive_rates={("a",): 0.5})
            )

    def test_spec_from_file(self, tmp_path):
        path = tmp_path / "spec.yaml"
        path.write_text(
            "seed: 3\nnoise_scale: 0.5\nfeature_dim: 3\n"
            "sensitive_names: [race, gender]\n"
            "subgroups:\n"
            "  - {key: [w, m], size: 40, positive_rate: 0.6}\n"
            "  - {key: [n, f], size: 20, positive_rate: 0.2}\n"
        )
        spec = SyntheticSpec.from_file(path)
        ds = generate_synthetic(spec)
        assert len(ds) == 60
        assert ds.feature_dim == 3
        assert list(ds.sensitive_schema) == ["race", "gender"]

    def test_spec_file_malformed(self, tmp_path):
        path = tmp_path / "spec.yaml"
        path.write_text("subgroups: nonsense\n")
        with pytest.raises(DataFormatError):
            SyntheticSpec.from_file(path)
