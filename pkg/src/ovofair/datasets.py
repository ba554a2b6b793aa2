"""Dataset ingestion: Adult census income, COMPAS recidivism, synthetic data.

Both real-dataset loaders binarize race and gender, drop rows with missing
values and one-hot encode the categorical non-sensitive columns. Encoding is
deterministic (categories sorted), so repeated loads are byte-identical.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
import yaml

from .model import Dataset, SubgroupKey


class DataFormatError(ValueError):
    """Input file does not match the expected layout."""


ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]
# fnlwgt is a census sampling weight, not a property of the person; dropping it
# leaves the 11 non-sensitive attributes used for prediction.
ADULT_NUMERIC = ["age", "education-num", "capital-gain", "capital-loss", "hours-per-week"]
ADULT_CATEGORICAL = [
    "workclass", "education", "marital-status", "occupation", "relationship",
    "native-country",
]

COMPAS_NUMERIC = ["age", "juv_fel_count", "juv_misd_count", "juv_other_count", "priors_count"]
COMPAS_CATEGORICAL = ["age_cat", "c_charge_degree", "c_charge_desc"]


@dataclass(frozen=True)
class FoldSplit:
    """One cross-validation fold: disjoint train/test covering the dataset."""

    train: Dataset
    test: Dataset
    fold_index: int
    seed: int


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic dataset with controlled subgroup bias.

    group_shift adds a constant to a subgroup's features, depressing (or
    inflating) its scores systematically so error-rate bias is controllable,
    not just the positive rate.
    """

    subgroup_sizes: Mapping[SubgroupKey, int]
    positive_rates: Mapping[SubgroupKey, float]
    noise_scale: float = 1.0
    seed: int = 0
    feature_dim: int = 2
    sensitive_names: tuple[str, ...] | None = None
    group_shift: Mapping[SubgroupKey, float] | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "SyntheticSpec":
        """Read a spec from a YAML/JSON mapping with a ``subgroups`` list."""
        with open(path) as fh:
            raw = yaml.safe_load(fh)
        try:
            sizes = {}
            rates = {}
            shifts = {}
            for entry in raw["subgroups"]:
                key = tuple(str(v) for v in entry["key"])
                sizes[key] = int(entry["size"])
                rates[key] = float(entry["positive_rate"])
                if "shift" in entry:
                    shifts[key] = float(entry["shift"])
            names = raw.get("sensitive_names")
            return cls(
                subgroup_sizes=sizes,
                positive_rates=rates,
                noise_scale=float(raw.get("noise_scale", 1.0)),
                seed=int(raw.get("seed", 0)),
                feature_dim=int(raw.get("feature_dim", 2)),
                sensitive_names=None if names is None else tuple(names),
                group_shift=shifts or None,
            )
        except (KeyError, TypeError) as exc:
            raise DataFormatError(f"malformed synthetic spec {path}: {exc}") from exc


def _one_hot_encode(
    frame: pd.DataFrame, numeric: Sequence[str], categorical: Sequence[str]
) -> tuple[np.ndarray, tuple[str, ...]]:
    """Numeric columns passed through, categoricals to sorted indicator columns."""
    columns: list[np.ndarray] = []
    names: list[str] = []
    for col in frame.columns:
        if col in numeric:
            try:
                values = pd.to_numeric(frame[col], errors="raise").to_numpy(np.float64)
            except (ValueError, TypeError) as exc:
                raise DataFormatError(f"column {col!r} is not numeric: {exc}") from exc
            columns.append(values)
            names.append(col)
        elif col in categorical:
            raw = frame[col].astype(str)
            for value in sorted(raw.unique()):
                columns.append((raw == value).to_numpy(np.float64))
                names.append(f"{col}={value}")
        else:
            raise DataFormatError(f"column {col!r} has no encoding rule")
    return np.column_stack(columns), tuple(names)


def _build_dataset(
    frame: pd.DataFrame,
    race_col: str,
    white_value: str,
    sex_col: str,
    labels: np.ndarray,
    numeric: Sequence[str],
    categorical: Sequence[str],
) -> Dataset:
    race = np.where(frame[race_col].astype(str) == white_value, "white", "non-white")
    gender = frame[sex_col].astype(str).str.lower().to_numpy()
    bad_gender = set(np.unique(gender)) - {"male", "female"}
    if bad_gender:
        raise DataFormatError(f"unexpected gender values {sorted(bad_gender)}")
    sensitive_rows = list(zip(race, gender))
    features, names = _one_hot_encode(
        frame.drop(columns=[race_col, sex_col]), numeric, categorical
    )
    return Dataset(
        sensitive_rows=sensitive_rows,
        features=features,
        labels=labels,
        sensitive_schema={
            "race": ("non-white", "white"),
            "gender": ("female", "male"),
        },
        feature_schema=names,
    )


def _adult_files(path: str | Path) -> list[Path]:
    path = Path(path)
    if path.is_dir():
        files = [path / "adult.data", path / "adult.test"]
        files = [f for f in files if f.exists()]
        if not files:
            raise FileNotFoundError(f"no adult.data or adult.test under {path}")
        return files
    if not path.exists():
        raise FileNotFoundError(f"no such dataset file or directory: {path}")
    return [path]


def load_adult(path: str | Path) -> Dataset:
    """Load the Adult census income data from a file or directory.

    A directory is expected to hold ``adult.data`` and/or ``adult.test`` in
    the standard 15-column comma-separated layout with "?" for missing
    values. Rows with any missing value are dropped; favorable means income
    above 50K. Race is binarized to white / non-white and gender to
    male / female; the remaining 11 attributes (fnlwgt excluded) become the
    feature matrix.
    """
    parts = []
    for f in _adult_files(path):
        try:
            parts.append(
                pd.read_csv(
                    f,
                    header=None,
                    names=ADULT_COLUMNS,
                    na_values="?",
                    skipinitialspace=True,
                    comment="|",
                    skip_blank_lines=True,
                )
            )
        except (pd.errors.ParserError, UnicodeDecodeError) as exc:
            raise DataFormatError(f"cannot parse {f}: {exc}") from exc
    frame = pd.concat(parts, ignore_index=True)
    if frame.shape[1] != len(ADULT_COLUMNS):
        raise DataFormatError(
            f"expected {len(ADULT_COLUMNS)} columns, got {frame.shape[1]}"
        )
    frame = frame.dropna().reset_index(drop=True)
    income = frame["income"].astype(str).str.strip().str.rstrip(".")
    bad = set(income.unique()) - {">50K", "<=50K"}
    if bad:
        raise DataFormatError(f"unexpected income values {sorted(bad)}")
    labels = (income == ">50K").to_numpy(np.int8)
    frame = frame.drop(columns=["income", "fnlwgt"])
    return _build_dataset(
        frame,
        race_col="race",
        white_value="White",
        sex_col="sex",
        labels=labels,
        numeric=ADULT_NUMERIC,
        categorical=ADULT_CATEGORICAL,
    )


def load_compas(path: str | Path) -> Dataset:
    """Load the ProPublica COMPAS two-year recidivism data.

    Applies the standard screening filters (screening-to-arrest window within
    30 days, known recidivism flag, ordinary-traffic charges and unscored
    rows removed) and drops rows with missing values in the retained columns.
    Favorable means no recidivism within two years. Race is binarized to
    white (Caucasian) / non-white; the 8 retained non-sensitive attributes
    become the feature matrix.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "compas-scores-two-years.csv"
    if not path.exists():
        raise FileNotFoundError(f"no such dataset file: {path}")
    try:
        frame = pd.read_csv(path, low_memory=False)
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot parse {path}: {exc}") from exc

    needed = {
        "days_b_screening_arrest", "is_recid", "c_charge_degree", "score_text",
        "race", "sex", "two_year_recid", *COMPAS_NUMERIC, *COMPAS_CATEGORICAL,
    }
    missing = needed - set(frame.columns)
    if missing:
        raise DataFormatError(f"missing columns {sorted(missing)}")

    # pandas reads the literal "N/A" score as missing, so cover both spellings
    frame = frame[
        (frame["days_b_screening_arrest"] <= 30)
        & (frame["days_b_screening_arrest"] >= -30)
        & (frame["is_recid"] != -1)
        & (frame["c_charge_degree"] != "O")
        & (frame["score_text"] != "N/A")
        & frame["score_text"].notna()
    ]
    kept = ["sex", "race", "two_year_recid", *COMPAS_NUMERIC, *COMPAS_CATEGORICAL]
    frame = frame[kept].dropna().reset_index(drop=True)
    labels = (frame["two_year_recid"].astype(int) == 0).to_numpy(np.int8)
    frame = frame.drop(columns=["two_year_recid"])
    return _build_dataset(
        frame,
        race_col="race",
        white_value="Caucasian",
        sex_col="sex",
        labels=labels,
        numeric=COMPAS_NUMERIC,
        categorical=COMPAS_CATEGORICAL,
    )


def kfold_split(dataset: Dataset, k: int, seed: int) -> list[FoldSplit]:
    """Shuffled k-fold partition; deterministic for a given seed."""
    n = len(dataset)
    if k < 2:
        raise ValueError(f"need k >= 2 folds, got {k}")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} instances")
    order = np.random.default_rng(seed).permutation(n)
    folds = np.array_split(order, k)
    splits = []
    for i, test_idx in enumerate(folds):
        train_idx = np.concatenate([f for j, f in enumerate(folds) if j != i])
        splits.append(
            FoldSplit(
                train=dataset.select(np.sort(train_idx)),
                test=dataset.select(np.sort(test_idx)),
                fold_index=i,
                seed=seed,
            )
        )
    return splits


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Synthetic dataset with exact subgroup sizes and seeded class draws.

    True classes are Bernoulli draws at each subgroup's positive rate;
    features are a +/-1 class-conditional mean shift plus Gaussian noise, so
    a linear classifier can recover the class signal.
    """
    keys = sorted(k for k, size in spec.subgroup_sizes.items() if size > 0)
    if not keys:
        raise ValueError("all subgroup sizes are zero")
    for key, size in spec.subgroup_sizes.items():
        if size < 0:
            raise ValueError(f"negative size for subgroup {key!r}")
    width = len(keys[0])
    for key in keys:
        if len(key) != width:
            raise ValueError("subgroup keys must have equal length")
        rate = spec.positive_rates.get(key)
        if rate is None:
            raise ValueError(f"no positive rate for subgroup {key!r}")
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"positive rate {rate} outside [0, 1]")

    names = spec.sensitive_names or tuple(f"attr{i}" for i in range(width))
    if len(names) != width:
        raise ValueError("sensitive_names length does not match key width")
    value_sets = {
        name: tuple(sorted({key[i] for key in keys})) for i, name in enumerate(names)
    }

    rng = np.random.default_rng(spec.seed)
    rows: list[SubgroupKey] = []
    labels: list[np.ndarray] = []
    features: list[np.ndarray] = []
    group_shift = spec.group_shift or {}
    for key in keys:
        size = spec.subgroup_sizes[key]
        y = (rng.random(size) < spec.positive_rates[key]).astype(np.int8)
        shift = np.where(y == 1, 1.0, -1.0)[:, None] + group_shift.get(key, 0.0)
        x = shift + spec.noise_scale * rng.standard_normal((size, spec.feature_dim))
        rows.extend([key] * size)
        labels.append(y)
        features.append(x)
    return Dataset(
        sensitive_rows=rows,
        features=np.vstack(features),
        labels=np.concatenate(labels),
        sensitive_schema=value_sets,
        feature_schema=tuple(f"f{i}" for i in range(spec.feature_dim)),
    )


def data_dir() -> Path:
    """Dataset directory: $OVOFAIR_DATA if set, else ./data."""
    return Path(os.environ.get("OVOFAIR_DATA", "data"))
