"""Synthetic difficulty-stratified benchmarks.

Generates questions in difficulty levels with sampled responses whose
accuracy falls and whose length grows with difficulty, so a full pipeline
run shows the budget rising with level and the trained policy compressing
easy levels harder than hard ones. Every numeric default here is an
artifact choice tuned only to reproduce those directional trends.

Lengths are lognormal (median per level, shared shape), rounded and clamped
into [1, l_max] so each question keeps exactly n samples. Each question
draws from its own counter-based substream keyed by (seed, question index),
so generation is reproducible and order-free.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import math

from .core import Question, Sample, compute_tlb
from .rng import CounterRng, derive_key

DEFAULT_ACCURACY = (0.95, 0.85, 0.70, 0.45, 0.15)
DEFAULT_CORRECT_MEDIAN = (300.0, 600.0, 1200.0, 2000.0, 3000.0)
DEFAULT_SIGMA_LEN = 0.4
DEFAULT_INCORRECT_FACTOR = 1.3
DEFAULT_L_MAX = 4096


@dataclass(frozen=True)
class DifficultyModel:
    """Per-level sampling model: accuracy and length distributions.

    Level d (1-based) has accuracy[d-1] chance per sample of being correct;
    correct lengths are lognormal with median correct_median[d-1] and shape
    sigma_len, incorrect lengths use median incorrect_median_factor times
    larger. The defaults make accuracy strictly decreasing and medians
    strictly increasing across five levels.
    """

    accuracy: tuple[float, ...] = DEFAULT_ACCURACY
    correct_median: tuple[float, ...] = DEFAULT_CORRECT_MEDIAN
    sigma_len: float = DEFAULT_SIGMA_LEN
    incorrect_median_factor: float = DEFAULT_INCORRECT_FACTOR
    l_max: int = DEFAULT_L_MAX

    def __post_init__(self):
        if len(self.accuracy) != len(self.correct_median) or not self.accuracy:
            raise ValueError("accuracy and correct_median must be non-empty and equal-length")
        for p in self.accuracy:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"accuracy must be in [0, 1], got {p}")
        for m in self.correct_median:
            if m <= 0 or m >= self.l_max:
                raise ValueError(f"length median must be in (0, l_max), got {m}")
        if self.sigma_len <= 0:
            raise ValueError(f"sigma_len must be positive, got {self.sigma_len}")
        if self.incorrect_median_factor <= 0:
            raise ValueError(f"incorrect_median_factor must be positive, got {self.incorrect_median_factor}")
        if self.l_max <= 0:
            raise ValueError(f"l_max must be positive, got {self.l_max}")

    @property
    def levels(self) -> range:
        return range(1, len(self.accuracy) + 1)

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "DifficultyModel":
        kwargs: dict[str, Any] = {}
        if "accuracy" in data:
            kwargs["accuracy"] = tuple(float(x) for x in data["accuracy"])
        if "correct_median" in data:
            kwargs["correct_median"] = tuple(float(x) for x in data["correct_median"])
        for key in ("sigma_len", "incorrect_median_factor"):
            if key in data:
                kwargs[key] = float(data[key])
        if "l_max" in data:
            kwargs["l_max"] = int(data["l_max"])
        return cls(**kwargs)


@dataclass(frozen=True)
class SynthDataset:
    questions: list[Question]
    samples: list[Sample]
    seed: int

    def samples_by_question(self) -> dict[str, list[Sample]]:
        grouped: dict[str, list[Sample]] = {q.id: [] for q in self.questions}
        for s in self.samples:
            grouped[s.question_id].append(s)
        return grouped


def _draw_length(rng: CounterRng, median: float, sigma: float, l_max: int) -> int:
    z = rng.gaussian()
    length = round(median * math.exp(sigma * z))
    return min(max(length, 1), l_max)


def generate(
    model: DifficultyModel, questions_per_level: int, n: int, seed: int
) -> SynthDataset:
    """Generate a benchmark with n samples per question.

    Per sample the draw order is fixed: one uniform for correctness, then
    two for the length gaussian, all from the question's substream.
    """
    if questions_per_level < 1:
        raise ValueError(f"questions_per_level must be >= 1, got {questions_per_level}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")

    questions: list[Question] = []
    samples: list[Sample] = []
    qindex = 0
    for level in model.levels:
        p = model.accuracy[level - 1]
        med_correct = model.correct_median[level - 1]
        med_incorrect = model.incorrect_median_factor * med_correct
        for k in range(questions_per_level):
            qid = f"l{level}q{k:03d}"
            questions.append(Question(id=qid, l_max=model.l_max, difficulty_label=level))
            rng = CounterRng(derive_key(seed, qindex))
            for j in range(n):
                correct = rng.bernoulli(p)
                median = med_correct if correct else med_incorrect
                length = _draw_length(rng, median, model.sigma_len, model.l_max)
                samples.append(
                    Sample(
                        question_id=qid,
                        sample_id=f"{qid}s{j:02d}",
                        token_len=length,
                        correct=correct,
                    )
                )
            qindex += 1
    return SynthDataset(questions=questions, samples=samples, seed=seed)


@dataclass(frozen=True)
class LevelTrend:
    level: int
    mean_accuracy: float
    mean_token_len: float
    mean_tlb: float


def trend_report(dataset: SynthDataset) -> list[LevelTrend]:
    """Per-level mean accuracy, sample length, and token length budget."""
    grouped = dataset.samples_by_question()
    by_level: dict[int, list[tuple[Question, list[Sample]]]] = {}
    for q in dataset.questions:
        by_level.setdefault(q.difficulty_label, []).append((q, grouped[q.id]))

    rows = []
    for level, entries in sorted(by_level.items()):
        all_samples = [s for _, group in entries for s in group]
        tlbs = [compute_tlb(q, group).l_budget for q, group in entries]
        rows.append(
            LevelTrend(
                level=level,
                mean_accuracy=sum(s.correct for s in all_samples) / len(all_samples),
                mean_token_len=sum(s.token_len for s in all_samples) / len(all_samples),
                mean_tlb=sum(tlbs) / len(tlbs),
            )
        )
    return rows
