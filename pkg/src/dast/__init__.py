"""Difficulty-adaptive token length budgets and budget preference training.

The pipeline stages, each usable on its own:

* `core` - data model and per-question token length budgets
* `rewards` - budget-calibrated reward scores
* `pairs` - contrastive pair construction, truncation, and capping
* `simpo` - preference objective and toy-policy training
* `synth` - synthetic difficulty-stratified benchmarks
* `metrics` - accuracy / length / compression-ratio evaluation
* `demo` - end-to-end run with report figures
"""

from .core import BudgetReport, Question, Sample, batch_tlb, compute_tlb, mean_tlb_by_level
from .metrics import MetricsReport, RunRecord, compare, compare_by_level, summarize
from .pairs import (
    PairKind,
    PairSummary,
    PreferencePair,
    best_pairs_for_question,
    build_dataset,
    cap_per_question,
    truncate_by_margin,
)
from .rewards import ScoredSample, calibrate, reward_curve
from .simpo import (
    SimPOConfig,
    ToyPolicy,
    TrainPair,
    grad_check,
    simpo_loss,
    simpo_margin,
    toy_logprob,
    train_toy,
)
from .synth import DifficultyModel, SynthDataset, generate, trend_report

__version__ = "0.1.0"

__all__ = [
    "BudgetReport",
    "DifficultyModel",
    "MetricsReport",
    "PairKind",
    "PairSummary",
    "PreferencePair",
    "Question",
    "RunRecord",
    "Sample",
    "ScoredSample",
    "SimPOConfig",
    "SynthDataset",
    "ToyPolicy",
    "TrainPair",
    "batch_tlb",
    "best_pairs_for_question",
    "build_dataset",
    "calibrate",
    "cap_per_question",
    "compare",
    "compare_by_level",
    "compute_tlb",
    "generate",
    "grad_check",
    "mean_tlb_by_level",
    "reward_curve",
    "simpo_loss",
    "simpo_margin",
    "summarize",
    "toy_logprob",
    "train_toy",
    "trend_report",
    "truncate_by_margin",
]
