"""Budget-calibrated reward scores.

A sample's reward combines its correctness with its relative deviation from
the question's token length budget, lam = (token_len - l_budget) / l_budget:

    correct:    max(-0.5 * lam + 0.5, 0.1)
    incorrect:  min( 0.9 * lam - 0.1, -0.1)

Correct responses are rewarded for staying under budget and floored at 0.1
once they run far past it. Incorrect responses are pushed toward the budget
(longer attempts score higher) and saturate at -0.1 from the budget onward.
Every correct reward therefore lands in [0.1, 1.0] and every incorrect one
in [-1.0, -0.1]; the two branches never overlap.

The five constants are deliberately not configurable; `ALTERNATIVE_REWARDS`
is a seam for experimenting with other shapes and ships empty.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass

from .core import BudgetReport, Sample

CORRECT_FLOOR = 0.1
INCORRECT_CEILING = -0.1

# name -> fn(correct, lam) -> reward; experimentation seam, intentionally empty
ALTERNATIVE_REWARDS: dict[str, Callable[[bool, float], float]] = {}


@dataclass(frozen=True)
class ScoredSample:
    """A sample with its relative budget deviation and calibrated reward."""

    sample: Sample
    lam: float
    reward: float


def reward_for(correct: bool, lam: float) -> float:
    """Calibrated reward as a pure function of correctness and deviation."""
    if correct:
        return max(-0.5 * lam + 0.5, CORRECT_FLOOR)
    return min(0.9 * lam - 0.1, INCORRECT_CEILING)


def calibrate(sample: Sample, report: BudgetReport) -> ScoredSample:
    """Score one sample against its question's budget report."""
    if sample.question_id != report.question_id:
        raise ValueError(
            f"mismatched question: sample {sample.sample_id} belongs to "
            f"{sample.question_id}, not {report.question_id}"
        )
    if report.l_budget <= 0:
        raise ValueError(f"degenerate budget for question {report.question_id}: {report.l_budget}")
    lam = (sample.token_len - report.l_budget) / report.l_budget
    return ScoredSample(sample=sample, lam=lam, reward=reward_for(sample.correct, lam))


def reward_curve(
    report: BudgetReport, grid: Sequence[float]
) -> list[tuple[float, float, float]]:
    """Tabulate both reward branches over a grid of token lengths.

    Returns (token_len, reward_correct, reward_incorrect) rows, for CSV
    export and plotting.
    """
    if report.l_budget <= 0:
        raise ValueError(f"degenerate budget for question {report.question_id}: {report.l_budget}")
    rows = []
    for token_len in grid:
        if token_len < 0:
            raise ValueError(f"grid token_len must be >= 0, got {token_len}")
        lam = (token_len - report.l_budget) / report.l_budget
        rows.append((token_len, reward_for(True, lam), reward_for(False, lam)))
    return rows
