"""Command-line interface exposing the pipeline as composable subcommands.

Subcommands: generate, budget, pairs, train-toy, eval, demo, count.

Exit codes: 0 success, 2 input validation failure, 3 check failure (failed
gradient check or demo trend check). Option precedence is CLI flag, then
--config JSON file, then built-in default; every run echoes its effective
settings to a metadata JSON next to its outputs.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import files
from .core import batch_tlb
from .demo import DemoConfig, DemoResult, run_demo
from .metrics import compare, compare_by_level
from .pairs import build_dataset
from .rewards import calibrate
from .simpo import SimPOConfig, ToyPolicy, grad_check, train_toy
from .synth import DifficultyModel, generate

GRAD_CHECK_LIMIT = 1e-5


class CheckFailure(Exception):
    """A verification step failed; maps to exit code 3."""


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise files.InputError(f"{path}: config must be a JSON object")
    return config


def _resolve(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _write_metadata(path: Path, command: str, settings: dict) -> None:
    # settings exclude paths so reruns into different directories compare equal
    files.write_json(path, {"command": command, **settings})


def _load_model(path: str | None) -> DifficultyModel:
    if path is None:
        return DifficultyModel()
    with open(path, encoding="utf-8") as f:
        return DifficultyModel.from_json_dict(json.load(f))


def cmd_generate(args) -> int:
    config = _load_config(args.config)
    seed = _resolve(args.seed, config, "seed", 0)
    qpl = _resolve(args.questions_per_level, config, "questions_per_level", 100)
    n = _resolve(args.samples_per_question, config, "samples_per_question", 20)
    model = _load_model(args.model_config)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dataset = generate(model, qpl, n, seed)
    files.write_jsonl(out / "questions.jsonl", (files.question_to_dict(q) for q in dataset.questions))
    files.write_jsonl(out / "samples.jsonl", (files.sample_to_dict(s) for s in dataset.samples))
    _write_metadata(
        out / "run_metadata.json",
        "generate",
        {"seed": seed, "questions_per_level": qpl, "samples_per_question": n},
    )
    print(f"wrote {len(dataset.questions)} questions, {len(dataset.samples)} samples")
    return 0


def cmd_budget(args) -> int:
    config = _load_config(args.config)
    exclude_truncated = bool(args.exclude_truncated or config.get("exclude_truncated", False))

    questions = files.load_questions(args.questions)
    samples = files.load_samples(args.samples)
    known = {q.id for q in questions}
    for s in samples:
        if s.question_id not in known:
            raise files.InputError(f"sample {s.sample_id} references unknown question {s.question_id}")

    grouped: dict[str, list] = {q.id: [] for q in questions}
    for s in samples:
        if exclude_truncated:
            l_max = next(q.l_max for q in questions if q.id == s.question_id)
            if s.token_len == l_max:
                continue
        grouped[s.question_id].append(s)

    dataset = [(q, grouped[q.id]) for q in questions if grouped[q.id]]
    skipped = sum(1 for q in questions if not grouped[q.id])
    reports = batch_tlb(dataset)
    files.write_jsonl(args.out, (files.budget_to_dict(b) for b in reports))
    _write_metadata(
        Path(str(args.out) + ".meta.json"), "budget", {"exclude_truncated": exclude_truncated}
    )
    if skipped:
        print(f"warning: omitted {skipped} question(s) with no samples", file=sys.stderr)
    print(f"wrote {len(reports)} budget reports")
    return 0


def _pair_flags(args, config: dict) -> dict:
    use_dcp = False if args.no_dcp else config.get("use_dcp", True)
    use_dicp = False if args.no_dicp else config.get("use_dicp", True)
    use_cicp = True if args.with_cicp else config.get("use_cicp", False)
    truncate_per_kind = (
        True if args.truncate_per_kind else config.get("truncate_per_kind", False)
    )
    return {
        "use_dcp": use_dcp,
        "use_dicp": use_dicp,
        "use_cicp": use_cicp,
        "truncate_per_kind": truncate_per_kind,
    }


def cmd_pairs(args) -> int:
    config = _load_config(args.config)
    delta = _resolve(args.delta, config, "delta", 0.15)
    flags = _pair_flags(args, config)

    questions = files.load_questions(args.questions)
    samples = files.load_samples(args.samples)
    budgets = files.load_budgets(args.budgets)
    known = {q.id for q in questions}
    by_question = {b.question_id: b for b in budgets}
    scored = []
    for s in samples:
        if s.question_id not in known:
            raise files.InputError(f"sample {s.sample_id} references unknown question {s.question_id}")
        if s.question_id not in by_question:
            raise files.InputError(f"no budget report for question {s.question_id}")
        scored.append(calibrate(s, by_question[s.question_id]))

    pairs, summary = build_dataset(scored, delta, **flags)
    files.write_jsonl(args.out, (files.pair_to_dict(p) for p in pairs))
    files.write_json(args.summary, files.summary_to_dict(summary))
    _write_metadata(Path(str(args.out) + ".meta.json"), "pairs", {"delta": delta, **flags})
    print(f"{summary.total_pairs} pairs")
    print(f"DCP % {summary.dcp_pct:.2f}")
    print(f"DICP % {summary.dicp_pct:.2f}")
    return 0


def _load_init_theta(path: str | None, bins: set[int]) -> dict[int, float]:
    if path is None:
        return {b: 0.0 for b in bins}
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    raw = data.get("theta", data)
    if not isinstance(raw, dict):
        raise files.InputError(f"{path}: expected a theta object")
    return {int(k): float(v) for k, v in raw.items()}


def cmd_train_toy(args) -> int:
    config = _load_config(args.config)
    cfg = SimPOConfig(
        beta=_resolve(args.beta, config, "beta", 2.0),
        gamma=_resolve(args.gamma, config, "gamma", 1.0),
        learning_rate=_resolve(args.learning_rate, config, "learning_rate", 0.5),
        epochs=_resolve(args.epochs, config, "epochs", 1),
    )

    pairs = files.load_pairs(args.pairs)
    questions = files.load_questions(args.questions)
    bins = {}
    for q in questions:
        if q.difficulty_label is None:
            raise files.InputError(f"question {q.id} has no difficulty_label")
        bins[q.id] = q.difficulty_label
    used_bins = set()
    for p in pairs:
        if p.question_id not in bins:
            raise files.InputError(f"pair question {p.question_id} not in questions file")
        used_bins.add(bins[p.question_id])

    init_theta = _load_init_theta(args.init_theta, used_bins)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_metadata(
        out / "run_metadata.json",
        "train-toy",
        {
            "beta": cfg.beta,
            "gamma": cfg.gamma,
            "learning_rate": cfg.learning_rate,
            "epochs": cfg.epochs,
            "grad_check": bool(args.grad_check),
        },
    )

    if args.grad_check:
        policy = ToyPolicy(theta=dict(init_theta))
        err = grad_check(policy, pairs, bins, cfg)
        print(f"grad check max relative error: {err:.3e}")
        if err >= GRAD_CHECK_LIMIT:
            raise CheckFailure(f"gradient check failed: {err:.3e} >= {GRAD_CHECK_LIMIT:.0e}")

    result = train_toy(pairs, bins, cfg, init_theta=init_theta)
    files.write_json(
        out / "theta.json",
        {
            "beta": cfg.beta,
            "gamma": cfg.gamma,
            "theta": {str(b): result.policy.theta[b] for b in result.policy.bins()},
        },
    )
    files.write_csv(
        out / "loss_trace.csv",
        ["epoch", "loss"],
        [(i, repr(loss)) for i, loss in enumerate(result.loss_trace)],
    )
    files.write_csv(
        out / "expected_length_by_level.csv",
        ["level", "expected_len_before", "expected_len_after"],
        [
            (b, f"{math.exp(init_theta[b]):.6f}", f"{result.policy.expected_length(b):.6f}")
            for b in result.policy.bins()
        ],
    )
    print(f"final loss {result.loss_trace[-1]:.6f} after {cfg.epochs} epoch(s)")
    return 0


def cmd_eval(args) -> int:
    baseline = files.load_run(args.baseline)
    treated = files.load_run(args.treated)
    report = compare(baseline, treated)
    files.write_json(args.out, files.metrics_to_dict(report))
    _write_metadata(Path(str(args.out) + ".meta.json"), "eval", {})

    print(f"ACC {report.acc:.4f}")
    print(f"LEN {report.len:.2f}")
    if report.c_len is not None:
        print(f"C-LEN {report.c_len:.2f}")
    print(f"CR {100.0 * report.cr:.1f}%")
    if report.c_cr is not None:
        print(f"C-CR {100.0 * report.c_cr:.1f}%")

    if args.per_level:
        by_level = compare_by_level(baseline, treated)
        files.write_csv(
            args.per_level,
            ["level", "acc", "len", "c_len", "cr", "c_cr"],
            [
                (
                    level,
                    f"{m.acc:.4f}",
                    f"{m.len:.2f}",
                    "" if m.c_len is None else f"{m.c_len:.2f}",
                    f"{m.cr:.4f}",
                    "" if m.c_cr is None else f"{m.c_cr:.4f}",
                )
                for level, m in by_level.items()
            ],
        )
    return 0


def cmd_demo(args) -> int:
    config = _load_config(args.config)
    flags = _pair_flags(args, config)
    cfg = DemoConfig(
        out_dir=Path(args.out_dir),
        seed=_resolve(args.seed, config, "seed", 7),
        questions_per_level=_resolve(args.questions_per_level, config, "questions_per_level", 100),
        samples_per_question=_resolve(
            args.samples_per_question, config, "samples_per_question", 20
        ),
        delta=_resolve(args.delta, config, "delta", 0.15),
        use_dcp=flags["use_dcp"],
        use_dicp=flags["use_dicp"],
        use_cicp=flags["use_cicp"],
        truncate_per_kind=flags["truncate_per_kind"],
        beta=_resolve(args.beta, config, "beta", 2.0),
        gamma=_resolve(args.gamma, config, "gamma", 1.0),
        learning_rate=_resolve(args.learning_rate, config, "learning_rate", 1.0),
        epochs=_resolve(args.epochs, config, "epochs", 350),
        model=_load_model(args.model_config),
    )
    result = run_demo(cfg)
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _print_demo(result)
    if not (result.budget_trend_ok and result.compression_trend_ok):
        raise CheckFailure("a demo trend check failed; see summary.md")
    return 0


def _print_demo(result: DemoResult) -> None:
    s = result.pair_summary
    print(f"pairs: {s.total_pairs} (DCP {s.dcp_pct:.2f}%, DICP {s.dicp_pct:.2f}%)")
    for level in sorted(result.cr_by_level):
        print(
            f"level {level}: expected length {result.expected_before[level]:.1f} -> "
            f"{result.expected_after[level]:.1f} (CR {100.0 * result.cr_by_level[level]:.1f}%)"
        )
    print(f"budget trend check: {'PASS' if result.budget_trend_ok else 'FAIL'}")
    print(f"compression trend check: {'PASS' if result.compression_trend_ok else 'FAIL'}")
    print(f"report: {result.out_dir / 'summary.md'}")


def cmd_count(args) -> int:
    print(
        "note: approximate token counts (whitespace split, not a model tokenizer); "
        "intended for demo data only",
        file=sys.stderr,
    )
    for path in args.paths:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        print(f"{path}\t{len(text.split())}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dast",
        description="Difficulty-adaptive token budgets, calibrated rewards, "
        "preference pairs, and toy SimPO training.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic stratified benchmark")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--questions-per-level", type=int)
    p.add_argument("--samples-per-question", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--model-config", help="JSON file with difficulty model parameters")
    p.add_argument("--config")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("budget", help="compute token length budgets")
    p.add_argument("--questions", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--exclude-truncated",
        action="store_true",
        help="drop samples whose token_len equals the question's l_max",
    )
    p.add_argument("--config")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("pairs", help="build filtered preference pairs")
    p.add_argument("--questions", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--budgets", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--delta", type=float)
    p.add_argument("--no-dcp", action="store_true")
    p.add_argument("--no-dicp", action="store_true")
    p.add_argument("--with-cicp", action="store_true")
    p.add_argument("--truncate-per-kind", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("train-toy", help="train the toy policy on preference pairs")
    p.add_argument("--pairs", required=True)
    p.add_argument("--questions", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--init-theta", help="JSON file with initial theta per bin (default zeros)")
    p.add_argument("--grad-check", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_train_toy)

    p = sub.add_parser("eval", help="compare a treated run against a baseline")
    p.add_argument("--baseline", required=True)
    p.add_argument("--treated", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-level", help="also write a per-difficulty-level CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("demo", help="run the full pipeline on synthetic data")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--questions-per-level", type=int)
    p.add_argument("--samples-per-question", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--no-dcp", action="store_true")
    p.add_argument("--no-dicp", action="store_true")
    p.add_argument("--with-cicp", action="store_true")
    p.add_argument("--truncate-per-kind", action="store_true")
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--model-config")
    p.add_argument("--config")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("count", help="approximate whitespace token counts (demo helper)")
    p.add_argument("paths", nargs="+", help="text files, or - for stdin")
    p.set_defaults(func=cmd_count)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
