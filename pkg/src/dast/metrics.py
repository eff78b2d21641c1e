"""Accuracy and length metrics for comparing two evaluation runs.

`summarize` reduces one run to accuracy, mean length, and mean correct
length; `compare` adds the compression ratios of a treated run against a
baseline: cr = 1 - len_treated / len_baseline (and c_cr over correct
records only). Negative ratios mean the treated run got longer.
"""

from collections.abc import Sequence
from dataclasses import dataclass


@dataclass(frozen=True)
class RunRecord:
    """One evaluated response: correctness is an input, never judged here."""

    question_id: str
    correct: bool
    token_len: float
    difficulty_label: int | None = None

    def __post_init__(self):
        if self.token_len < 0:
            raise ValueError(f"record {self.question_id}: token_len must be >= 0")


@dataclass(frozen=True)
class RunStats:
    acc: float
    len: float
    c_len: float | None


@dataclass(frozen=True)
class MetricsReport:
    acc: float
    len: float
    c_len: float | None
    cr: float
    c_cr: float | None


def summarize(run: Sequence[RunRecord]) -> RunStats:
    """Accuracy, mean length, and mean correct length of one run.

    c_len is None when the run has no correct records.
    """
    if not run:
        raise ValueError("empty run")
    correct_lens = [r.token_len for r in run if r.correct]
    return RunStats(
        acc=len(correct_lens) / len(run),
        len=sum(r.token_len for r in run) / len(run),
        c_len=sum(correct_lens) / len(correct_lens) if correct_lens else None,
    )


def compare(baseline: Sequence[RunRecord], treated: Sequence[RunRecord]) -> MetricsReport:
    """Treated-run metrics plus compression ratios against the baseline."""
    base = summarize(baseline)
    treat = summarize(treated)
    if base.len == 0:
        raise ValueError("baseline mean length is 0; compression ratio undefined")
    c_cr = None
    if base.c_len is not None and treat.c_len is not None:
        c_cr = 1.0 - treat.c_len / base.c_len
    return MetricsReport(
        acc=treat.acc,
        len=treat.len,
        c_len=treat.c_len,
        cr=1.0 - treat.len / base.len,
        c_cr=c_cr,
    )


def _split_by_level(run: Sequence[RunRecord], name: str) -> dict[int, list[RunRecord]]:
    out: dict[int, list[RunRecord]] = {}
    for r in run:
        if r.difficulty_label is None:
            raise ValueError(f"{name} record for question {r.question_id} has no difficulty_label")
        out.setdefault(r.difficulty_label, []).append(r)
    return out


def compare_by_level(
    baseline: Sequence[RunRecord], treated: Sequence[RunRecord]
) -> dict[int, MetricsReport]:
    """`compare` per difficulty level, keyed by level in ascending order.

    Both runs must label every record, and cover the same set of levels.
    """
    base_levels = _split_by_level(baseline, "baseline")
    treat_levels = _split_by_level(treated, "treated")
    if set(base_levels) != set(treat_levels):
        only = sorted(set(base_levels) ^ set(treat_levels))
        raise ValueError(f"levels present on only one side: {only}")
    return {level: compare(base_levels[level], treat_levels[level]) for level in sorted(base_levels)}
