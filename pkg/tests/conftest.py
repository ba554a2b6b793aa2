import numpy as np
import pytest

from ovofair.datasets import SyntheticSpec, generate_synthetic
from ovofair.model import Dataset


def make_dataset(keys, labels, features=None, determined=None) -> Dataset:
    """Small dataset from parallel lists; features default to the label signal."""
    keys = [tuple(k) if not isinstance(k, tuple) else k for k in keys]
    labels = np.asarray(labels, dtype=np.int8)
    if features is None:
        rng = np.random.default_rng(0)
        features = np.where(labels == 1, 1.0, -1.0)[:, None] + 0.5 * rng.standard_normal(
            (len(labels), 2)
        )
    width = len(keys[0])
    names = tuple(f"attr{i}" for i in range(width))
    schema = {
        name: tuple(sorted({k[i] for k in keys})) for i, name in enumerate(names)
    }
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    return Dataset(
        sensitive_rows=keys,
        features=features,
        labels=labels,
        sensitive_schema=schema,
        feature_schema=tuple(f"f{i}" for i in range(features.shape[1])),
        determined=determined,
    )


def random_labelled_dataset(rng: np.random.Generator, n_subgroups: int, max_n: int = 50):
    """Random predictions/truths/keys for metric oracle checks."""
    n = int(rng.integers(n_subgroups, max_n + 1))
    keys = [(f"g{int(rng.integers(n_subgroups))}",) for _ in range(n)]
    # force every subgroup to appear
    for g in range(n_subgroups):
        keys[g] = (f"g{g}",)
    preds = rng.integers(0, 2, n).astype(np.int8)
    truths = rng.integers(0, 2, n).astype(np.int8)
    return preds, truths, keys


@pytest.fixture
def biased_pair() -> Dataset:
    """Two subgroups with a large positive-rate gap and learnable features."""
    return generate_synthetic(
        SyntheticSpec(
            subgroup_sizes={("a",): 300, ("b",): 200},
            positive_rates={("a",): 0.7, ("b",): 0.25},
            noise_scale=0.8,
            seed=11,
        )
    )


@pytest.fixture
def four_group_biased() -> Dataset:
    """Four subgroups with spread rates and depressed scores for the worst
    ones, so both selection rates and error rates carry intersectional bias."""
    return generate_synthetic(
        SyntheticSpec(
            subgroup_sizes={
                ("w", "m"): 400, ("w", "f"): 250, ("n", "m"): 200, ("n", "f"): 150,
            },
            positive_rates={
                ("w", "m"): 0.65, ("w", "f"): 0.45, ("n", "m"): 0.35, ("n", "f"): 0.1,
            },
            noise_scale=0.9,
            seed=7,
            group_shift={("n", "f"): -0.9, ("n", "m"): -0.4, ("w", "f"): -0.2},
        )
    )
