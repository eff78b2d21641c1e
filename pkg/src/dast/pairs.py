"""Contrastive preference pair construction, filtering, and capping.

Pairs are classified by the correctness flags of their two samples:

* DCP  - both correct; the shorter (higher-reward) sample wins, teaching
  conciseness within budget.
* DICP - both incorrect; the sample closer to the budget wins, teaching
  deeper reasoning on hard questions.
* CICP - one correct, one incorrect; the correct sample always wins. Off by
  default because it adds no length signal.

Per question and kind, the pair with the largest reward margin is kept.
The pooled candidates then pass a two-stage filter: margin truncation drops
the lowest-margin fraction, and a per-question cap keeps at most one DCP
and one DICP.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from .rewards import ScoredSample


class PairKind(str, Enum):
    DCP = "DCP"
    DICP = "DICP"
    CICP = "CICP"


@dataclass(frozen=True)
class PreferencePair:
    """A winner/loser sample pair with its reward margin."""

    question_id: str
    winner: str
    loser: str
    kind: PairKind
    margin: float
    winner_len: int
    loser_len: int

    def __post_init__(self):
        if self.margin <= 0:
            raise ValueError(f"pair {self.winner}/{self.loser}: margin must be > 0")
        if self.winner == self.loser:
            raise ValueError(f"pair {self.winner}: winner and loser must differ")


@dataclass(frozen=True)
class PairSummary:
    total_pairs: int
    dcp_count: int
    dicp_count: int
    cicp_count: int
    dcp_pct: float
    dicp_pct: float


def _best_pair(
    question_id: str, kind: PairKind, candidates: list[tuple[ScoredSample, ScoredSample]]
) -> PreferencePair | None:
    """Max-margin pair among (winner, loser) candidates, or None.

    Zero-margin candidates are discarded. Ties prefer the larger absolute
    length gap, then the lexicographically smallest (winner, loser) ids.
    """
    best = None
    best_key = None
    best_ids = None
    for w, l in candidates:
        margin = w.reward - l.reward
        if margin <= 0:
            continue
        key = (margin, abs(w.sample.token_len - l.sample.token_len))
        ids = (w.sample.sample_id, l.sample.sample_id)
        if best is None or key > best_key or (key == best_key and ids < best_ids):
            best, best_key, best_ids = (w, l), key, ids
    if best is None:
        return None
    w, l = best
    return PreferencePair(
        question_id=question_id,
        winner=w.sample.sample_id,
        loser=l.sample.sample_id,
        kind=kind,
        margin=best_key[0],
        winner_len=w.sample.token_len,
        loser_len=l.sample.token_len,
    )


def best_pairs_for_question(
    scored: Sequence[ScoredSample],
    include_cicp: bool = False,
    *,
    use_dcp: bool = True,
    use_dicp: bool = True,
) -> list[PreferencePair]:
    """Select the max-margin pair of each enabled kind for one question.

    All scored samples must share one question. Kinds without two eligible
    samples, or whose best margin is zero, contribute nothing.
    """
    if not scored:
        return []
    question_id = scored[0].sample.question_id
    for s in scored:
        if s.sample.question_id != question_id:
            raise ValueError(
                f"mismatched question: sample {s.sample.sample_id} belongs to "
                f"{s.sample.question_id}, not {question_id}"
            )

    correct = [s for s in scored if s.sample.correct]
    incorrect = [s for s in scored if not s.sample.correct]

    pairs = []
    if use_dcp:
        cands = []
        for a, b in combinations(correct, 2):
            w, l = (a, b) if a.reward >= b.reward else (b, a)
            cands.append((w, l))
        pair = _best_pair(question_id, PairKind.DCP, cands)
        if pair:
            pairs.append(pair)
    if use_dicp:
        cands = []
        for a, b in combinations(incorrect, 2):
            w, l = (a, b) if a.reward >= b.reward else (b, a)
            cands.append((w, l))
        pair = _best_pair(question_id, PairKind.DICP, cands)
        if pair:
            pairs.append(pair)
    if include_cicp:
        # sign separation makes the correct sample the winner in every CICP
        cands = [(c, i) for c in correct for i in incorrect]
        pair = _best_pair(question_id, PairKind.CICP, cands)
        if pair:
            pairs.append(pair)
    return pairs


def truncate_by_margin(pairs: Sequence[PreferencePair], delta: float) -> list[PreferencePair]:
    """Drop the floor(delta * |D|) lowest-margin pairs.

    Ties are broken by input position (earlier pairs are dropped first);
    survivors keep their original order.
    """
    if not 0 <= delta < 1:
        raise ValueError(f"delta must be in [0, 1), got {delta}")
    k = math.floor(delta * len(pairs))
    if k == 0:
        return list(pairs)
    order = sorted(range(len(pairs)), key=lambda i: (pairs[i].margin, i))
    dropped = set(order[:k])
    return [p for i, p in enumerate(pairs) if i not in dropped]


def cap_per_question(pairs: Sequence[PreferencePair]) -> list[PreferencePair]:
    """Keep at most the best DCP and the best DICP per question.

    CICP pairs pass through and do not count against the cap. Margin ties
    keep the earliest pair in input order.
    """
    best: dict[tuple[str, PairKind], int] = {}
    for i, p in enumerate(pairs):
        if p.kind is PairKind.CICP:
            continue
        key = (p.question_id, p.kind)
        if key not in best or p.margin > pairs[best[key]].margin:
            best[key] = i
    keep = set(best.values())
    return [p for i, p in enumerate(pairs) if p.kind is PairKind.CICP or i in keep]


def build_dataset(
    scored: Sequence[ScoredSample],
    delta: float = 0.15,
    *,
    use_dcp: bool = True,
    use_dicp: bool = True,
    use_cicp: bool = False,
    truncate_per_kind: bool = False,
) -> tuple[list[PreferencePair], PairSummary]:
    """Run the full pair pipeline over a scored dataset.

    Groups samples by question (first-appearance order), selects per-question
    max-margin pairs of the enabled kinds, truncates the pooled candidates by
    margin, then applies the per-question cap. `truncate_per_kind` truncates
    each kind's candidate pool separately instead of the joint pool.
    """
    if not (use_dcp or use_dicp or use_cicp):
        raise ValueError("no pair kinds enabled")

    groups: dict[str, list[ScoredSample]] = {}
    for s in scored:
        groups.setdefault(s.sample.question_id, []).append(s)

    candidates: list[PreferencePair] = []
    for group in groups.values():
        candidates.extend(
            best_pairs_for_question(group, include_cicp=use_cicp, use_dcp=use_dcp, use_dicp=use_dicp)
        )

    if truncate_per_kind:
        surviving = set()
        for kind in PairKind:
            of_kind = [p for p in candidates if p.kind is kind]
            surviving.update(id(p) for p in truncate_by_margin(of_kind, delta))
        truncated = [p for p in candidates if id(p) in surviving]
    else:
        truncated = truncate_by_margin(candidates, delta)

    final = cap_per_question(truncated)

    total = len(final)
    dcp = sum(1 for p in final if p.kind is PairKind.DCP)
    dicp = sum(1 for p in final if p.kind is PairKind.DICP)
    cicp = sum(1 for p in final if p.kind is PairKind.CICP)
    summary = PairSummary(
        total_pairs=total,
        dcp_count=dcp,
        dicp_count=dicp,
        cicp_count=cicp,
        dcp_pct=100.0 * dcp / total if total else 0.0,
        dicp_pct=100.0 * dicp / total if total else 0.0,
    )
    return final, summary
