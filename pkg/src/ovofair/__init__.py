"""Intersectional bias mitigation via pairwise subgroup comparison.

Binary classifiers are made fair across every combination of sensitive
attributes by mitigating each pair of subgroups separately, blending the
pairwise votes and probabilities into a per-instance score, and searching
for per-subgroup score thresholds that maximize balanced accuracy under a
user-set disparity cap.
"""

from .classifier import LogisticModel, TrainConfig, fit, fit_fair_regularized, predict, predict_proba
from .datasets import (
    FoldSplit,
    SyntheticSpec,
    generate_synthetic,
    kfold_split,
    load_adult,
    load_compas,
)
from .harness import ExperimentConfig, RunResult, emit_report, run_experiment, sweep_epsilon
from .metrics import (
    Criterion,
    DisparityForm,
    DisparityReport,
    MetricSpec,
    balanced_accuracy,
    disparity,
    metric_value,
)
from .mitigators import MitigationKind, PairContext
from .model import (
    ClassLabel,
    Dataset,
    Instance,
    SubgroupKey,
    SubgroupPair,
    enumerate_pairs,
    enumerate_subgroups,
    pair_subset,
    pairs_for_subgroup,
)
from .ovo import (
    PipelineConfig,
    ScoredInstance,
    SearchConfig,
    SearchResult,
    ThresholdMap,
    apply_thresholds,
    run_inprocessing,
    run_postprocessing,
    run_preprocessing,
    score_instance,
    search_thresholds,
)

__version__ = "0.1.0"
