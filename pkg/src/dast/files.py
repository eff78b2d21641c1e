"""JSONL / JSON / CSV readers and writers for the pipeline file formats.

All files are UTF-8 with LF line endings. JSONL and JSON outputs carry full
float precision (repr round-trip); CSV exports are display-precision.
Reader errors name the file and line so CLI diagnostics can point at the
offending record.
"""

import csv
import json
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import Any

from .core import BudgetReport, Question, Sample
from .metrics import MetricsReport, RunRecord
from .pairs import PairKind, PairSummary, PreferencePair


class InputError(ValueError):
    """Malformed or inconsistent input file content."""


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield (line_number, object) for each non-blank line."""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise InputError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def write_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def write_json(path: str | Path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, ensure_ascii=False, indent=2)
        f.write("\n")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _field(path, lineno, obj, key, kind, optional=False):
    if key not in obj or obj[key] is None:
        if optional:
            return None
        raise InputError(f"{path}:{lineno}: missing field {key!r}")
    value = obj[key]
    try:
        if kind is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if kind is float:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind is str:
            if not isinstance(value, str):
                raise TypeError
            return value
    except (TypeError, ValueError):
        pass
    raise InputError(f"{path}:{lineno}: field {key!r} must be {kind.__name__}, got {value!r}")


def load_questions(path: str | Path) -> list[Question]:
    questions = []
    seen = set()
    for lineno, obj in read_jsonl(path):
        qid = _field(path, lineno, obj, "id", str)
        if qid in seen:
            raise InputError(f"{path}:{lineno}: duplicate question id {qid!r}")
        seen.add(qid)
        try:
            questions.append(
                Question(
                    id=qid,
                    l_max=_field(path, lineno, obj, "l_max", int),
                    difficulty_label=_field(path, lineno, obj, "difficulty_label", int, optional=True),
                )
            )
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    return questions


def load_samples(path: str | Path) -> list[Sample]:
    samples = []
    seen = set()
    for lineno, obj in read_jsonl(path):
        key = (obj.get("question_id"), obj.get("sample_id"))
        if key in seen:
            raise InputError(f"{path}:{lineno}: duplicate sample id {key[1]!r} for question {key[0]!r}")
        seen.add(key)
        try:
            samples.append(
                Sample(
                    question_id=_field(path, lineno, obj, "question_id", str),
                    sample_id=_field(path, lineno, obj, "sample_id", str),
                    token_len=_field(path, lineno, obj, "token_len", int),
                    correct=_field(path, lineno, obj, "correct", bool),
                    logprob_sum=_field(path, lineno, obj, "logprob_sum", float, optional=True),
                )
            )
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    return samples


def load_budgets(path: str | Path) -> list[BudgetReport]:
    budgets = []
    for lineno, obj in read_jsonl(path):
        try:
            budgets.append(
                BudgetReport(
                    question_id=_field(path, lineno, obj, "question_id", str),
                    n=_field(path, lineno, obj, "n", int),
                    c=_field(path, lineno, obj, "c", int),
                    p=_field(path, lineno, obj, "p", float),
                    l_bar_r=_field(path, lineno, obj, "l_bar_r", float),
                    l_budget=_field(path, lineno, obj, "l_budget", float),
                )
            )
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    return budgets


def load_pairs(path: str | Path) -> list[PreferencePair]:
    pairs = []
    for lineno, obj in read_jsonl(path):
        kind = _field(path, lineno, obj, "kind", str)
        if kind not in PairKind.__members__:
            raise InputError(f"{path}:{lineno}: unknown pair kind {kind!r}")
        try:
            pairs.append(
                PreferencePair(
                    question_id=_field(path, lineno, obj, "question_id", str),
                    winner=_field(path, lineno, obj, "winner", str),
                    loser=_field(path, lineno, obj, "loser", str),
                    kind=PairKind[kind],
                    margin=_field(path, lineno, obj, "margin", float),
                    winner_len=_field(path, lineno, obj, "winner_len", int),
                    loser_len=_field(path, lineno, obj, "loser_len", int),
                )
            )
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    return pairs


def load_run(path: str | Path) -> list[RunRecord]:
    records = []
    for lineno, obj in read_jsonl(path):
        try:
            records.append(
                RunRecord(
                    question_id=_field(path, lineno, obj, "question_id", str),
                    correct=_field(path, lineno, obj, "correct", bool),
                    token_len=_field(path, lineno, obj, "token_len", float),
                    difficulty_label=_field(path, lineno, obj, "difficulty_label", int, optional=True),
                )
            )
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
    return records


def question_to_dict(q: Question) -> dict[str, Any]:
    out: dict[str, Any] = {"id": q.id}
    if q.difficulty_label is not None:
        out["difficulty_label"] = q.difficulty_label
    out["l_max"] = q.l_max
    return out


def sample_to_dict(s: Sample) -> dict[str, Any]:
    out: dict[str, Any] = {
        "question_id": s.question_id,
        "sample_id": s.sample_id,
        "token_len": s.token_len,
        "correct": s.correct,
    }
    if s.logprob_sum is not None:
        out["logprob_sum"] = s.logprob_sum
    return out


def budget_to_dict(b: BudgetReport) -> dict[str, Any]:
    return {
        "question_id": b.question_id,
        "n": b.n,
        "c": b.c,
        "p": b.p,
        "l_bar_r": b.l_bar_r,
        "l_budget": b.l_budget,
    }


def pair_to_dict(p: PreferencePair) -> dict[str, Any]:
    return {
        "question_id": p.question_id,
        "winner": p.winner,
        "loser": p.loser,
        "kind": p.kind.value,
        "margin": p.margin,
        "winner_len": p.winner_len,
        "loser_len": p.loser_len,
    }


def summary_to_dict(s: PairSummary) -> dict[str, Any]:
    return {
        "total_pairs": s.total_pairs,
        "dcp_count": s.dcp_count,
        "dicp_count": s.dicp_count,
        "cicp_count": s.cicp_count,
        "dcp_pct": s.dcp_pct,
        "dicp_pct": s.dicp_pct,
    }


def run_record_to_dict(r: RunRecord) -> dict[str, Any]:
    out: dict[str, Any] = {
        "question_id": r.question_id,
        "correct": r.correct,
        "token_len": r.token_len,
    }
    if r.difficulty_label is not None:
        out["difficulty_label"] = r.difficulty_label
    return out


def metrics_to_dict(m: MetricsReport) -> dict[str, Any]:
    out: dict[str, Any] = {"acc": m.acc, "len": m.len}
    if m.c_len is not None:
        out["c_len"] = m.c_len
    out["cr"] = m.cr
    if m.c_cr is not None:
        out["c_cr"] = m.c_cr
    return out
