"""Logistic regression trained by full-batch gradient descent.

Used as the plain baseline classifier, as the ranker inside label massaging,
as the base model for post-processing, and (with a group-gap penalty) as the
in-processing mitigator. Training is deterministic: zero initialization,
backtracking line search, no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import Dataset, Instance

_PROBA_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    l2_strength: float = 1.0
    max_iterations: int = 10_000
    tolerance: float = 1e-6
    seed: int = 0


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_scales: np.ndarray

    def standardize(self, features: np.ndarray) -> np.ndarray:
        return (features - self.feature_means) / self.feature_scales

    def proba_matrix(self, features: np.ndarray) -> np.ndarray:
        """Favorable-class probability for each row of a feature matrix."""
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.weights.size:
            raise ValueError(
                f"expected (n, {self.weights.size}) features, got {features.shape}"
            )
        z = self.standardize(features) @ self.weights + self.bias
        return _sigmoid(z)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "logistic",
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "feature_means": self.feature_means.tolist(),
            "feature_scales": self.feature_scales.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        if d.get("kind") != "logistic":
            raise ValueError(f"not a serialized logistic model: {d.get('kind')!r}")
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            feature_means=np.asarray(d["feature_means"], dtype=np.float64),
            feature_scales=np.asarray(d["feature_scales"], dtype=np.float64),
        )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Stable in both tails; clipped so probabilities stay strictly in (0, 1).
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return np.clip(out, _PROBA_EPS, 1.0 - _PROBA_EPS)


def _log_loss(p: np.ndarray, y: np.ndarray) -> float:
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _standardization(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    means = features.mean(axis=0)
    scales = features.std(axis=0)
    scales = np.where(scales > 0.0, scales, 1.0)
    return means, scales


def _minimize(
    objective: Callable[[np.ndarray], tuple[float, np.ndarray]],
    dim: int,
    config: TrainConfig,
) -> tuple[np.ndarray, list[float]]:
    """Gradient descent with backtracking (Armijo) line search from zero init.

    Stops when the gradient infinity-norm drops below config.tolerance or
    after config.max_iterations accepted steps. Returns the parameter vector
    and the loss after each accepted step (monotone decreasing).
    """
    params = np.zeros(dim)
    loss, grad = objective(params)
    history = [loss]
    step = 1.0
    for _ in range(config.max_iterations):
        gnorm = float(np.max(np.abs(grad)))
        if gnorm <= config.tolerance:
            break
        g_sq = float(grad @ grad)
        step = min(step * 2.0, 1e6)
        while True:
            candidate = params - step * grad
            cand_loss, cand_grad = objective(candidate)
            if cand_loss <= loss - 1e-4 * step * g_sq:
                break
            step *= 0.5
            if step < 1e-18:
                # No descent possible at float resolution; treat as converged.
                return params, history
        params, loss, grad = candidate, cand_loss, cand_grad
        history.append(loss)
    return params, history


def _check_trainable(train: Dataset) -> tuple[np.ndarray, np.ndarray]:
    y = train.labels.astype(np.float64)
    if np.all(y == y[0]):
        raise ValueError("training data contains a single class")
    if not np.all(np.isfinite(train.features)):
        raise ValueError("training features contain non-finite values")
    return train.features, y


def plain_objective(x: np.ndarray, y: np.ndarray, reg: float) -> Callable:
    """Mean log-loss plus reg/2 * ||w||^2 (bias unpenalized), with gradient.

    Parameters are packed as [weights..., bias]; x must be standardized.
    """
    n, m = x.shape

    def objective(params: np.ndarray) -> tuple[float, np.ndarray]:
        w, b = params[:m], params[m]
        p = _sigmoid(x @ w + b)
        loss = _log_loss(p, y) + 0.5 * reg * float(w @ w)
        resid = (p - y) / n
        grad = np.empty(m + 1)
        grad[:m] = x.T @ resid + reg * w
        grad[m] = resid.sum()
        return loss, grad

    return objective


def fit(train: Dataset, config: TrainConfig = TrainConfig()) -> LogisticModel:
    """L2-regularized logistic regression on standardized features.

    Objective: mean negative log-likelihood plus l2_strength/(2n) * ||w||^2
    (bias unpenalized), minimized to the gradient tolerance or iteration cap.
    """
    features, y = _check_trainable(train)
    means, scales = _standardization(features)
    x = (features - means) / scales
    n, m = x.shape
    objective = plain_objective(x, y, config.l2_strength / n)
    params, _ = _minimize(objective, m + 1, config)
    return LogisticModel(
        weights=params[:m], bias=float(params[m]), feature_means=means, feature_scales=scales
    )


def fit_fair_regularized(
    train: Dataset,
    config: TrainConfig = TrainConfig(),
    fairness_weight: float = 0.0,
) -> LogisticModel:
    """Logistic regression with a between-group mean-probability penalty.

    The training data must contain exactly two subgroups; the objective adds
    fairness_weight * (mean proba of group A - mean proba of group B)^2.
    With fairness_weight = 0 this is identical to :func:`fit`.
    """
    groups = sorted(set(train.sensitive_rows))
    if len(groups) != 2:
        raise ValueError(
            f"fair-regularized training needs exactly 2 subgroups, got {len(groups)}"
        )
    if fairness_weight == 0.0:
        return fit(train, config)

    features, y = _check_trainable(train)
    means, scales = _standardization(features)
    x = (features - means) / scales
    mask_a = train.subgroup_mask(groups[0])
    objective = fair_objective(x, y, config.l2_strength / len(y), mask_a, fairness_weight)
    params, _ = _minimize(objective, x.shape[1] + 1, config)
    return LogisticModel(
        weights=params[:-1], bias=float(params[-1]), feature_means=means, feature_scales=scales
    )


def fair_objective(
    x: np.ndarray,
    y: np.ndarray,
    reg: float,
    mask_a: np.ndarray,
    fairness_weight: float,
) -> Callable:
    """plain_objective plus fairness_weight * (group mean-probability gap)^2."""
    n, m = x.shape
    mask_a = np.asarray(mask_a, dtype=bool)
    n_a = int(mask_a.sum())
    n_b = n - n_a

    def objective(params: np.ndarray) -> tuple[float, np.ndarray]:
        w, b = params[:m], params[m]
        p = _sigmoid(x @ w + b)
        gap = float(p[mask_a].mean() - p[~mask_a].mean())
        loss = _log_loss(p, y) + 0.5 * reg * float(w @ w) + fairness_weight * gap * gap
        resid = (p - y) / n
        # d gap / d params via dp/dz = p (1 - p)
        dp = p * (1.0 - p)
        gap_vec = np.where(mask_a, dp / n_a, -dp / n_b)
        grad = np.empty(m + 1)
        grad[:m] = x.T @ resid + reg * w + 2.0 * fairness_weight * gap * (x.T @ gap_vec)
        grad[m] = resid.sum() + 2.0 * fairness_weight * gap * gap_vec.sum()
        return loss, grad

    return objective


def _features_of(instance: Instance | np.ndarray) -> np.ndarray:
    x = instance.features if isinstance(instance, Instance) else np.asarray(instance)
    if x.ndim != 1:
        raise ValueError(f"expected a single feature vector, got shape {x.shape}")
    return x


def predict_proba(model: LogisticModel, instance: Instance | np.ndarray) -> float:
    """Favorable-class probability for one instance; strictly inside (0, 1)."""
    x = _features_of(instance)
    return float(model.proba_matrix(x[None, :])[0])


def predict(
    model: LogisticModel, instance: Instance | np.ndarray, cutoff: float = 0.5
) -> int:
    """1 (favorable) iff the predicted probability strictly exceeds cutoff."""
    return int(predict_proba(model, instance) > cutoff)


def predict_matrix(
    model: LogisticModel, features: np.ndarray, cutoff: float = 0.5
) -> np.ndarray:
    """Vectorized :func:`predict` over a feature matrix; int8 labels."""
    return (model.proba_matrix(features) > cutoff).astype(np.int8)
