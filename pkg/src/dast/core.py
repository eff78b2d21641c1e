"""Shared data model and the per-question token length budget.

The budget blends the mean length of correct sampled responses with the
maximum generation length, weighted by sampling accuracy:

    l_budget = p * l_bar_r + (1 - p) * l_max,   p = c / n

A question nobody answers correctly (p = 0) gets the full maximum length,
so hard questions are budgeted for deep reasoning while easy ones are
budgeted near their observed correct-response length.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass


@dataclass(frozen=True)
class Question:
    """One problem instance. `l_max` is the maximum generation length."""

    id: str
    l_max: int
    difficulty_label: int | None = None

    def __post_init__(self):
        if self.l_max <= 0:
            raise ValueError(f"question {self.id}: l_max must be positive, got {self.l_max}")


@dataclass(frozen=True)
class Sample:
    """One sampled response, reduced to its length and correctness.

    `logprob_sum` is the sum of per-token natural-log probabilities when the
    sampling backend provides it; the budget pipeline itself never needs it.
    """

    question_id: str
    sample_id: str
    token_len: int
    correct: bool
    logprob_sum: float | None = None

    def __post_init__(self):
        if self.token_len < 0:
            raise ValueError(f"sample {self.sample_id}: token_len must be >= 0, got {self.token_len}")
        if self.logprob_sum is not None and self.logprob_sum > 0:
            raise ValueError(f"sample {self.sample_id}: logprob_sum must be <= 0, got {self.logprob_sum}")


@dataclass(frozen=True)
class BudgetReport:
    """Sampling statistics and the resulting token length budget.

    `l_bar_r` is the mean token length over correct samples; it is stored as
    0.0 when there are none (`c == 0`), in which case the budget formula does
    not use it.
    """

    question_id: str
    n: int
    c: int
    p: float
    l_bar_r: float
    l_budget: float

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"budget for {self.question_id}: n must be positive")
        if not 0 <= self.c <= self.n:
            raise ValueError(f"budget for {self.question_id}: c must be in [0, n]")


def compute_tlb(question: Question, samples: Sequence[Sample]) -> BudgetReport:
    """Compute the token length budget for one question.

    Raises ValueError on an empty sample list, a sample belonging to another
    question, or a sample longer than the question's `l_max`.
    """
    if not samples:
        raise ValueError(f"no samples for question {question.id}")
    for s in samples:
        if s.question_id != question.id:
            raise ValueError(
                f"mismatched question: sample {s.sample_id} belongs to "
                f"{s.question_id}, not {question.id}"
            )
        if s.token_len > question.l_max:
            raise ValueError(
                f"sample {s.sample_id}: token_len {s.token_len} exceeds l_max {question.l_max}"
            )

    n = len(samples)
    correct_lens = [s.token_len for s in samples if s.correct]
    c = len(correct_lens)
    p = c / n
    if c == 0:
        # extreme difficulty: budget the full generation length
        l_bar_r = 0.0
        l_budget = float(question.l_max)
    else:
        l_bar_r = sum(correct_lens) / c
        l_budget = p * l_bar_r + (1.0 - p) * question.l_max
    return BudgetReport(question_id=question.id, n=n, c=c, p=p, l_bar_r=l_bar_r, l_budget=l_budget)


def batch_tlb(dataset: Iterable[tuple[Question, Sequence[Sample]]]) -> list[BudgetReport]:
    """Budget every (question, samples) group, preserving input order."""
    reports = []
    for question, samples in dataset:
        try:
            reports.append(compute_tlb(question, samples))
        except ValueError as exc:
            raise ValueError(f"question {question.id}: {exc}") from exc
    return reports


def mean_tlb_by_level(
    reports: Sequence[BudgetReport], questions: Sequence[Question]
) -> dict[int, float]:
    """Mean budget per difficulty level, keyed by level in ascending order.

    Every report's question must exist in `questions` and carry a difficulty
    label; levels with no reports are absent from the result.
    """
    by_id: Mapping[str, Question] = {q.id: q for q in questions}
    budgets: dict[int, list[float]] = {}
    for report in reports:
        question = by_id.get(report.question_id)
        if question is None:
            raise ValueError(f"question {report.question_id} not found")
        if question.difficulty_label is None:
            raise ValueError(f"question {question.id} has no difficulty_label")
        budgets.setdefault(question.difficulty_label, []).append(report.l_budget)
    return {level: sum(vals) / len(vals) for level, vals in sorted(budgets.items())}
