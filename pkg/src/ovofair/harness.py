"""Experiment driver: cross-validated runs, epsilon sweeps, report emission.

A run is {dataset x approach x method x criterion x disparity form x epsilon}
evaluated with k-fold cross-validation. Reports carry per-fold disparity for
all three criteria, the mean/std of the configured one, threshold-search
feasibility, and any method deviation notes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import LogisticModel, TrainConfig, fit, predict_matrix
from .datasets import (
    FoldSplit,
    SyntheticSpec,
    generate_synthetic,
    kfold_split,
    load_adult,
    load_compas,
)
from .metrics import Criterion, DisparityForm, DisparityReport, MetricSpec, disparity
from .mitigators import (
    MitigationKind,
    PairContext,
    eo_eval_batch,
    eo_fit,
    fair_lr_fit,
    massaging_fit,
    roc_eval_batch,
    roc_fit,
    uniform_draws,
)
from .model import (
    Dataset,
    SubgroupPair,
    enumerate_pairs,
    enumerate_subgroups,
    pair_subset_indices,
)
from .ovo import (
    PairFits,
    PipelineConfig,
    SearchConfig,
    apply_thresholds,
    fit_pair_mitigators,
    refit_on_mitigated,
    score_dataset,
    search_thresholds,
    _search_config_for,
)

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "dataset", "approach", "method", "criterion", "form", "epsilon", "fold",
    "gamma", "balanced_accuracy", "feasible", "schema_version", "notes",
]

APPROACHES = ("plain", "baseline_single_attribute", "ovo")

# Which fairness criteria each mitigation method supports.
METHOD_CRITERIA: dict[MitigationKind, frozenset[Criterion]] = {
    MitigationKind.MS: frozenset({Criterion.DEMOGRAPHIC_PARITY}),
    MitigationKind.FAIR_LR: frozenset(
        {Criterion.DEMOGRAPHIC_PARITY, Criterion.EQUALIZED_ODDS, Criterion.EQUAL_OPPORTUNITY}
    ),
    MitigationKind.ROC: frozenset({Criterion.DEMOGRAPHIC_PARITY}),
    MitigationKind.EO_ODDS: frozenset({Criterion.EQUALIZED_ODDS}),
    MitigationKind.EO_OPP: frozenset({Criterion.EQUAL_OPPORTUNITY}),
}

NOTE_FAIR_LR = (
    "in-processing mitigation is a fairness-regularized logistic regression, "
    "not adversarial debiasing"
)
NOTE_COMPAS_LABEL = (
    "COMPAS favorable outcome is 'no recidivism within two years'"
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    approach: str = "ovo"
    method: MitigationKind | None = None
    criterion: Criterion = Criterion.DEMOGRAPHIC_PARITY
    disparity_form: DisparityForm = DisparityForm.DIFFERENCE
    epsilon: float = 0.03
    folds: int = 5
    seed: int = 0
    attribute: str | None = None
    data_dir: str | None = None
    cache_dir: str | None = None
    l2_strength: float = 1.0
    max_iterations: int = 10_000
    tolerance: float = 1e-6
    fairness_weight: float = 100.0
    grid_quantiles: int = 256
    restarts: int = 5

    def validate(self) -> None:
        if self.approach not in APPROACHES:
            raise ConfigError(f"unknown approach {self.approach!r}; use one of {APPROACHES}")
        kind = self.dataset.split(":", 1)[0]
        if kind not in ("adult", "compas", "synthetic"):
            raise ConfigError(
                f"unknown dataset {self.dataset!r}; use adult, compas or synthetic:<path>"
            )
        if kind == "synthetic" and ":" not in self.dataset:
            raise ConfigError("synthetic dataset needs a spec path: synthetic:<path>")
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must be in (0, 1], got {self.epsilon}")
        if self.folds < 2:
            raise ConfigError("need at least 2 folds")
        if self.approach == "plain":
            return
        if self.method is None:
            raise ConfigError(f"approach {self.approach!r} requires a method")
        allowed = METHOD_CRITERIA[self.method]
        if self.criterion not in allowed:
            raise ConfigError(
                f"method {self.method.value} does not support criterion "
                f"{self.criterion.value}; supported: {sorted(c.value for c in allowed)}"
            )
        if self.approach == "baseline_single_attribute" and not self.attribute:
            raise ConfigError(
                "baseline_single_attribute requires --attribute (one sensitive attribute)"
            )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            l2_strength=self.l2_strength,
            max_iterations=self.max_iterations,
            tolerance=self.tolerance,
            seed=self.seed,
        )

    def pipeline_config(self, fold_index: int) -> PipelineConfig:
        fold_seed = int(
            np.random.SeedSequence([self.seed, fold_index]).generate_state(1)[0]
        )
        return PipelineConfig(
            search=SearchConfig(
                epsilon=self.epsilon,
                metric=MetricSpec(self.criterion, self.disparity_form),
                grid_quantiles=self.grid_quantiles,
                restarts=self.restarts,
                seed=fold_seed,
            ),
            train=self.train_config(),
            fairness_weight=self.fairness_weight,
            seed=fold_seed,
        )

    def deviation_notes(self) -> tuple[str, ...]:
        notes = []
        if self.method is MitigationKind.FAIR_LR:
            notes.append(NOTE_FAIR_LR)
        if self.dataset == "compas":
            notes.append(NOTE_COMPAS_LABEL)
        return tuple(notes)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "approach": self.approach,
            "method": None if self.method is None else self.method.value,
            "criterion": self.criterion.value,
            "disparity_form": self.disparity_form.value,
            "epsilon": self.epsilon,
            "folds": self.folds,
            "seed": self.seed,
            "attribute": self.attribute,
            "data_dir": self.data_dir,
            "cache_dir": self.cache_dir,
            "l2_strength": self.l2_strength,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "fairness_weight": self.fairness_weight,
            "grid_quantiles": self.grid_quantiles,
            "restarts": self.restarts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if d.get("method") is not None:
            d["method"] = MitigationKind(d["method"])
        d["criterion"] = Criterion(d.get("criterion", "demographic_parity"))
        d["disparity_form"] = DisparityForm(d.get("disparity_form", "difference"))
        return cls(**d)


@dataclass(frozen=True)
class FoldOutcome:
    fold_index: int
    reports: dict[Criterion, DisparityReport]
    feasible: bool
    train_accuracy: float | None
    train_gamma: float | None

    def to_dict(self) -> dict:
        return {
            "fold_index": self.fold_index,
            "reports": {c.value: r.to_dict() for c, r in sorted(self.reports.items())},
            "feasible": self.feasible,
            "train_accuracy": self.train_accuracy,
            "train_gamma": self.train_gamma,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FoldOutcome":
        return cls(
            fold_index=d["fold_index"],
            reports={
                Criterion(c): DisparityReport.from_dict(r)
                for c, r in d["reports"].items()
            },
            feasible=d["feasible"],
            train_accuracy=d["train_accuracy"],
            train_gamma=d["train_gamma"],
        )


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    folds: tuple[FoldOutcome, ...]
    mean_gamma: float
    std_gamma: float
    mean_balanced_accuracy: float
    std_balanced_accuracy: float
    deviation_notes: tuple[str, ...]

    def fold_gamma(self, outcome: FoldOutcome) -> float:
        report = outcome.reports[self.config.criterion]
        return report.gamma(self.config.disparity_form)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "folds": [f.to_dict() for f in self.folds],
            "mean_gamma": self.mean_gamma,
            "std_gamma": self.std_gamma,
            "mean_balanced_accuracy": self.mean_balanced_accuracy,
            "std_balanced_accuracy": self.std_balanced_accuracy,
            "deviation_notes": list(self.deviation_notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        return cls(
            config=ExperimentConfig.from_dict(d["config"]),
            folds=tuple(FoldOutcome.from_dict(f) for f in d["folds"]),
            mean_gamma=d["mean_gamma"],
            std_gamma=d["std_gamma"],
            mean_balanced_accuracy=d["mean_balanced_accuracy"],
            std_balanced_accuracy=d["std_balanced_accuracy"],
            deviation_notes=tuple(d["deviation_notes"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunResult":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Dataset resolution
# ---------------------------------------------------------------------------


def _base_dir(config: ExperimentConfig) -> Path:
    if config.data_dir:
        return Path(config.data_dir)
    return Path(os.environ.get("OVOFAIR_DATA", "data"))


def adult_path(base: Path) -> Path:
    sub = base / "adult"
    return sub if (sub / "adult.data").exists() else base


def compas_path(base: Path) -> Path:
    for candidate in (
        base / "compas" / "compas-scores-two-years.csv",
        base / "compas-scores-two-years.csv",
    ):
        if candidate.exists():
            return candidate
    return base / "compas" / "compas-scores-two-years.csv"


def load_dataset(config: ExperimentConfig) -> Dataset:
    if config.dataset == "adult":
        return load_adult(adult_path(_base_dir(config)))
    if config.dataset == "compas":
        return load_compas(compas_path(_base_dir(config)))
    if config.dataset.startswith("synthetic:"):
        return generate_synthetic(SyntheticSpec.from_file(config.dataset.split(":", 1)[1]))
    raise ConfigError(f"unknown dataset {config.dataset!r}")


# ---------------------------------------------------------------------------
# Disk cache for fitted fold state
# ---------------------------------------------------------------------------


class FitCache:
    """Content-addressed JSON store for per-fold fitted models and contexts."""

    def __init__(self, cache_dir: str | Path | None):
        self.dir = None if cache_dir is None else Path(cache_dir)
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(parts: dict) -> str:
        return hashlib.sha256(
            json.dumps(parts, sort_keys=True, default=str).encode()
        ).hexdigest()

    def get(self, key: str) -> dict | None:
        if self.dir is None:
            return None
        path = self.dir / f"{key}.json"
        if not path.exists():
            return None
        with open(path) as fh:
            return json.load(fh)

    def put(self, key: str, payload: dict) -> None:
        if self.dir is None:
            return
        tmp = self.dir / f"{key}.tmp"
        with open(tmp, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
        tmp.replace(self.dir / f"{key}.json")


def dataset_fingerprint(dataset: Dataset) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(dataset.features).tobytes())
    h.update(np.ascontiguousarray(dataset.labels).tobytes())
    h.update(repr(dataset.sensitive_rows).encode())
    return h.hexdigest()


def _cached_plain_fit(
    train: Dataset, tcfg: TrainConfig, cache: FitCache, base_key: dict
) -> LogisticModel:
    key = cache.key({**base_key, "piece": "plain", "train": vars(tcfg)})
    found = cache.get(key)
    if found is not None:
        return LogisticModel.from_dict(found["model"])
    model = fit(train, tcfg)
    cache.put(key, {"model": model.to_dict()})
    return model


def _cached_pair_fits(
    train: Dataset,
    method: MitigationKind,
    pcfg: PipelineConfig,
    cache: FitCache,
    base_key: dict,
) -> PairFits:
    key = cache.key(
        {
            **base_key,
            "piece": "pairs",
            "method": method.value,
            "train": vars(pcfg.train),
            "fairness_weight": pcfg.fairness_weight,
            "roc_grid": list(pcfg.roc_width_grid),
        }
    )
    found = cache.get(key)
    if found is not None:
        contexts = {}
        relabeled = {}
        subgroups = enumerate_subgroups(train)
        pairs = enumerate_pairs(subgroups)
        for entry in found["contexts"]:
            ctx = PairContext.from_dict(entry)
            contexts[ctx.pair] = ctx
        for pair_repr, labels in found["relabeled"]:
            pair = SubgroupPair(tuple(pair_repr[0]), tuple(pair_repr[1]))
            relabeled[pair] = np.asarray(labels, dtype=np.int8)
        plain = (
            LogisticModel.from_dict(found["plain"]) if found["plain"] is not None else None
        )
        return PairFits(
            method=method,
            subgroups=subgroups,
            pairs=pairs,
            plain=plain,
            contexts=contexts,
            relabeled=relabeled,
        )

    if method in (MitigationKind.ROC, MitigationKind.EO_ODDS, MitigationKind.EO_OPP):
        # Reuse the plain model cached independently of the mitigation method.
        plain = _cached_plain_fit(train, pcfg.train, cache, base_key)
        fits = fit_pair_mitigators_with_plain(train, method, pcfg, plain)
    else:
        fits = fit_pair_mitigators(train, method, pcfg)
    cache.put(
        key,
        {
            "plain": None if fits.plain is None else fits.plain.to_dict(),
            "contexts": [fits.contexts[p].to_dict() for p in fits.pairs],
            "relabeled": [
                [[list(p.first), list(p.second)], arr.tolist()]
                for p, arr in sorted(
                    fits.relabeled.items(), key=lambda kv: (kv[0].first, kv[0].second)
                )
            ],
        },
    )
    return fits


def fit_pair_mitigators_with_plain(
    train: Dataset, method: MitigationKind, pcfg: PipelineConfig, plain: LogisticModel
) -> PairFits:
    """fit_pair_mitigators variant that reuses an already-fitted plain model."""
    subgroups = enumerate_subgroups(train)
    pairs = enumerate_pairs(subgroups)
    contexts: dict = {}
    for pair in pairs:
        subset = train.select(pair_subset_indices(train, pair))
        try:
            if method is MitigationKind.ROC:
                ctx = roc_fit(plain, subset, pcfg.roc_width_grid)
            elif method is MitigationKind.EO_ODDS:
                ctx = eo_fit(plain, subset, "odds")
            else:
                ctx = eo_fit(plain, subset, "opportunity")
        except ValueError as exc:
            raise ValueError(f"cannot fit pair {pair}: {exc}") from exc
        contexts[pair] = ctx
    return PairFits(
        method=method, subgroups=subgroups, pairs=pairs, plain=plain, contexts=contexts
    )


# ---------------------------------------------------------------------------
# Per-fold execution
# ---------------------------------------------------------------------------


@dataclass
class _FoldRun:
    """Predictions and search stats for one fold at one epsilon."""

    labels: np.ndarray
    feasible: bool
    train_accuracy: float | None
    train_gamma: float | None


@dataclass
class _FoldArtifacts:
    """Epsilon-independent fitted state, reusable across a sweep."""

    fold: FoldSplit
    pcfg: PipelineConfig
    fits: PairFits | None = None
    scored_train: list | None = None
    scored_test: list | None = None
    plain_model: LogisticModel | None = None
    baseline_labels: np.ndarray | None = None


def _prepare_fold(
    config: ExperimentConfig, fold: FoldSplit, cache: FitCache, base_key: dict
) -> _FoldArtifacts:
    pcfg = config.pipeline_config(fold.fold_index)
    art = _FoldArtifacts(fold=fold, pcfg=pcfg)
    fold_key = {**base_key, "fold": fold.fold_index}

    if config.approach == "plain":
        art.plain_model = _cached_plain_fit(fold.train, pcfg.train, cache, fold_key)
        art.baseline_labels = predict_matrix(art.plain_model, fold.test.features)
        return art

    if config.approach == "baseline_single_attribute":
        art.baseline_labels = _baseline_predictions(config, fold, pcfg)
        return art

    method = config.method
    art.fits = _cached_pair_fits(fold.train, method, pcfg, cache, fold_key)
    art.scored_train = score_dataset(art.fits, fold.train, pcfg, split_tag=0)
    if method is not MitigationKind.MS:
        art.scored_test = score_dataset(art.fits, fold.test, pcfg, split_tag=1)
    return art


def _run_fold(config: ExperimentConfig, art: _FoldArtifacts, epsilon: float) -> _FoldRun:
    if art.baseline_labels is not None:
        return _FoldRun(
            labels=art.baseline_labels, feasible=True, train_accuracy=None, train_gamma=None
        )

    pcfg = art.pcfg
    scfg = replace(
        _search_config_for(config.method, pcfg), epsilon=epsilon
    )
    search = search_thresholds(art.scored_train, scfg)
    if config.method is MitigationKind.MS:
        new_labels = apply_thresholds(art.scored_train, search.thresholds)
        mitigated = art.fold.train.with_labels(new_labels, determined=new_labels)
        model = refit_on_mitigated(mitigated, pcfg.train)
        labels = predict_matrix(model, art.fold.test.features)
    else:
        labels = apply_thresholds(art.scored_test, search.thresholds)
    return _FoldRun(
        labels=labels,
        feasible=search.feasible,
        train_accuracy=search.balanced_accuracy,
        train_gamma=search.gamma,
    )


def _baseline_predictions(
    config: ExperimentConfig, fold: FoldSplit, pcfg: PipelineConfig
) -> np.ndarray:
    """Conventional mitigation on one sensitive attribute, no pairwise step."""
    view_train = fold.train.project_sensitive(config.attribute)
    groups = enumerate_subgroups(view_train)
    if len(groups) != 2:
        raise ConfigError(
            f"baseline attribute {config.attribute!r} must be binary, "
            f"found {len(groups)} values"
        )
    method = config.method
    test_features = fold.test.features
    test_keys = [
        (row[list(fold.train.sensitive_schema).index(config.attribute)],)
        for row in fold.test.sensitive_rows
    ]

    if method is MitigationKind.MS:
        relabeled, _ = massaging_fit(view_train, pcfg.train)
        model = fit(relabeled, pcfg.train)
        return predict_matrix(model, test_features)
    if method is MitigationKind.FAIR_LR:
        ctx = fair_lr_fit(view_train, pcfg.train, pcfg.fairness_weight)
        return (ctx.params["model"].proba_matrix(test_features) > 0.5).astype(np.int8)

    plain = fit(view_train, pcfg.train)
    if method is MitigationKind.ROC:
        ctx = roc_fit(plain, view_train, pcfg.roc_width_grid)
    else:
        ctx = eo_fit(plain, view_train, "odds" if method is MitigationKind.EO_ODDS else "opportunity")

    labels = np.full(len(fold.test), -1, dtype=np.int8)
    draws = uniform_draws([pcfg.seed, 1, 0], len(fold.test))
    for key in groups:
        rows = np.asarray([i for i, k in enumerate(test_keys) if k == key], dtype=np.int64)
        if rows.size == 0:
            continue
        if method is MitigationKind.ROC:
            votes, _ = roc_eval_batch(ctx, plain, test_features[rows], key)
        else:
            votes, _ = eo_eval_batch(ctx, plain, test_features[rows], key, draws[rows])
        labels[rows] = votes
    if np.any(labels < 0):
        missing = {test_keys[i] for i in np.flatnonzero(labels < 0)}
        raise ValueError(f"test values {sorted(missing)} unseen in training data")
    return labels


def _evaluate_fold(
    config: ExperimentConfig, art: _FoldArtifacts, run: _FoldRun
) -> FoldOutcome:
    test = art.fold.test
    reports = {
        crit: disparity(
            run.labels, test.labels, test.sensitive_rows,
            MetricSpec(crit, config.disparity_form),
        )
        for crit in Criterion
    }
    return FoldOutcome(
        fold_index=art.fold.fold_index,
        reports=reports,
        feasible=run.feasible,
        train_accuracy=run.train_accuracy,
        train_gamma=run.train_gamma,
    )


def _aggregate(config: ExperimentConfig, outcomes: Sequence[FoldOutcome]) -> RunResult:
    gammas = np.array(
        [o.reports[config.criterion].gamma(config.disparity_form) for o in outcomes]
    )
    accs = np.array([o.reports[config.criterion].balanced_accuracy for o in outcomes])
    return RunResult(
        config=config,
        folds=tuple(outcomes),
        mean_gamma=float(gammas.mean()),
        std_gamma=float(gammas.std()),
        mean_balanced_accuracy=float(accs.mean()),
        std_balanced_accuracy=float(accs.std()),
        deviation_notes=config.deviation_notes(),
    )


def run_experiment(config: ExperimentConfig, dataset: Dataset | None = None) -> RunResult:
    """One cross-validated experiment at the configured epsilon."""
    config.validate()
    if dataset is None:
        dataset = load_dataset(config)
    cache = FitCache(config.cache_dir)
    base_key = {
        "data": dataset_fingerprint(dataset),
        "folds": config.folds,
        "seed": config.seed,
    }
    outcomes = []
    for fold in kfold_split(dataset, config.folds, config.seed):
        art = _prepare_fold(config, fold, cache, base_key)
        run = _run_fold(config, art, config.epsilon)
        outcomes.append(_evaluate_fold(config, art, run))
    return _aggregate(config, outcomes)


def sweep_epsilon(
    config: ExperimentConfig,
    eps_start: float,
    eps_end: float,
    eps_step: float,
    dataset: Dataset | None = None,
) -> list[RunResult]:
    """run_experiment at each epsilon in [eps_start, eps_end], reusing fits.

    The per-fold pair mitigators and instance scores do not depend on
    epsilon, so they are computed once; each sweep point only re-runs the
    threshold search (and, for massaging, the final retraining).
    """
    if not 0.0 < eps_start <= eps_end <= 1.0:
        raise ConfigError("need 0 < eps_start <= eps_end <= 1")
    if eps_step <= 0.0:
        raise ConfigError("eps_step must be positive")
    config.validate()
    if dataset is None:
        dataset = load_dataset(config)
    cache = FitCache(config.cache_dir)
    base_key = {
        "data": dataset_fingerprint(dataset),
        "folds": config.folds,
        "seed": config.seed,
    }
    epsilons = []
    eps = eps_start
    while eps <= eps_end + 1e-12:
        epsilons.append(round(eps, 10))
        eps += eps_step

    artifacts = [
        _prepare_fold(config, fold, cache, base_key)
        for fold in kfold_split(dataset, config.folds, config.seed)
    ]
    results = []
    for eps in epsilons:
        cfg_eps = replace(config, epsilon=eps)
        outcomes = [
            _evaluate_fold(cfg_eps, art, _run_fold(cfg_eps, art, eps)) for art in artifacts
        ]
        results.append(_aggregate(cfg_eps, outcomes))
    return results


def sweep_table(results: Sequence[RunResult]) -> list[dict]:
    """Flat (epsilon, accuracy, gamma) series for plotting or CSV emission."""
    return [
        {
            "epsilon": r.config.epsilon,
            "mean_balanced_accuracy": r.mean_balanced_accuracy,
            "std_balanced_accuracy": r.std_balanced_accuracy,
            "mean_gamma": r.mean_gamma,
            "std_gamma": r.std_gamma,
            "feasible_folds": sum(1 for f in r.folds if f.feasible),
            "folds": len(r.folds),
        }
        for r in results
    ]


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def emit_report(result: RunResult, fmt: str, path: str | Path) -> Path:
    """Write one run's report as json or csv; deterministic field order."""
    path = Path(path)
    if fmt == "json":
        path.write_text(result.to_json() + "\n")
        return path
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    notes = "; ".join(result.deviation_notes)
    cfg = result.config
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for outcome in result.folds:
            report = outcome.reports[cfg.criterion]
            writer.writerow(
                [
                    cfg.dataset,
                    cfg.approach,
                    "" if cfg.method is None else cfg.method.value,
                    cfg.criterion.value,
                    cfg.disparity_form.value,
                    repr(cfg.epsilon),
                    outcome.fold_index,
                    repr(report.gamma(cfg.disparity_form)),
                    repr(report.balanced_accuracy),
                    outcome.feasible,
                    SCHEMA_VERSION,
                    notes,
                ]
            )
    return path


def emit_sweep(results: Sequence[RunResult], fmt: str, path: str | Path) -> Path:
    """Write an epsilon sweep's series table as json or csv."""
    path = Path(path)
    table = sweep_table(results)
    if fmt == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": results[0].config.to_dict() if results else None,
            "series": table,
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return path
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    columns = [
        "epsilon", "mean_balanced_accuracy", "std_balanced_accuracy",
        "mean_gamma", "std_gamma", "feasible_folds", "folds",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns + ["schema_version"])
        for row in table:
            writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in columns] + [SCHEMA_VERSION])
    return path
