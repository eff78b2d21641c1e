"""End-to-end pipeline demo on a synthetic benchmark.

Generates a difficulty-stratified dataset, computes budgets, builds
preference pairs, trains the toy policy, and evaluates compression per
level. Writes every intermediate file, a markdown summary with two trend
checks, and report figures:

* check 1 - the mean token length budget rises strictly with difficulty;
* check 2 - the per-level compression ratio after training is
  non-increasing from the easiest to the hardest level.

Every output is a pure function of the config, so identical configs give
byte-identical output trees (paths are never embedded in the outputs).
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

from . import files, plots
from .core import batch_tlb, mean_tlb_by_level
from .metrics import MetricsReport, RunRecord, compare, compare_by_level
from .pairs import PairSummary, build_dataset
from .rewards import calibrate, reward_curve
from .simpo import SimPOConfig, train_toy
from .synth import DifficultyModel, generate, trend_report


@dataclass(frozen=True)
class DemoConfig:
    out_dir: Path
    seed: int = 7
    questions_per_level: int = 100
    samples_per_question: int = 20
    delta: float = 0.15
    use_dcp: bool = True
    use_dicp: bool = True
    use_cicp: bool = False
    truncate_per_kind: bool = False
    beta: float = 2.0
    gamma: float = 1.0
    learning_rate: float = 1.0
    epochs: int = 350
    model: DifficultyModel = field(default_factory=DifficultyModel)


@dataclass(frozen=True)
class DemoResult:
    out_dir: Path
    tlb_by_level: dict[int, float]
    budget_trend_ok: bool
    pair_summary: PairSummary
    expected_before: dict[int, float]
    expected_after: dict[int, float]
    cr_by_level: dict[int, float]
    compression_trend_ok: bool
    overall: MetricsReport
    final_loss: float
    warnings: list[str]


def _metadata(cfg: DemoConfig) -> dict:
    # paths are deliberately excluded so reruns into different directories
    # stay byte-identical
    return {
        "command": "demo",
        "seed": cfg.seed,
        "questions_per_level": cfg.questions_per_level,
        "samples_per_question": cfg.samples_per_question,
        "delta": cfg.delta,
        "use_dcp": cfg.use_dcp,
        "use_dicp": cfg.use_dicp,
        "use_cicp": cfg.use_cicp,
        "truncate_per_kind": cfg.truncate_per_kind,
        "beta": cfg.beta,
        "gamma": cfg.gamma,
        "learning_rate": cfg.learning_rate,
        "epochs": cfg.epochs,
    }


def run_demo(cfg: DemoConfig) -> DemoResult:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    figdir = out / "figures"
    figdir.mkdir(exist_ok=True)
    warnings = []
    if cfg.delta == 0:
        warnings.append(
            "delta is 0: every low-margin candidate pair is kept; weakly "
            "discriminative long pairs are prone to reward hacking the length "
            "objective, so prefer a positive truncation threshold"
        )

    files.write_json(out / "run_metadata.json", _metadata(cfg))

    # 1. synthetic benchmark
    dataset = generate(cfg.model, cfg.questions_per_level, cfg.samples_per_question, cfg.seed)
    files.write_jsonl(out / "questions.jsonl", (files.question_to_dict(q) for q in dataset.questions))
    files.write_jsonl(out / "samples.jsonl", (files.sample_to_dict(s) for s in dataset.samples))

    # 2. budgets and the per-level budget trend
    grouped = dataset.samples_by_question()
    reports = batch_tlb([(q, grouped[q.id]) for q in dataset.questions])
    files.write_jsonl(out / "budgets.jsonl", (files.budget_to_dict(b) for b in reports))
    tlb_means = mean_tlb_by_level(reports, dataset.questions)
    trend = trend_report(dataset)
    files.write_csv(
        out / "trend_report.csv",
        ["level", "mean_accuracy", "mean_token_len", "mean_tlb"],
        [
            (row.level, f"{row.mean_accuracy:.4f}", f"{row.mean_token_len:.2f}", f"{row.mean_tlb:.2f}")
            for row in trend
        ],
    )
    levels = sorted(tlb_means)
    budget_trend_ok = all(tlb_means[a] < tlb_means[b] for a, b in zip(levels, levels[1:]))

    # 3. calibrated rewards and preference pairs
    report_by_q = {r.question_id: r for r in reports}
    scored = [calibrate(s, report_by_q[s.question_id]) for s in dataset.samples]
    pairs, summary = build_dataset(
        scored,
        cfg.delta,
        use_dcp=cfg.use_dcp,
        use_dicp=cfg.use_dicp,
        use_cicp=cfg.use_cicp,
        truncate_per_kind=cfg.truncate_per_kind,
    )
    files.write_jsonl(out / "pairs.jsonl", (files.pair_to_dict(p) for p in pairs))
    files.write_json(out / "pairs_summary.json", files.summary_to_dict(summary))

    # reward curve of the median-budget question, for the report
    median_report = sorted(reports, key=lambda r: (r.l_budget, r.question_id))[(len(reports) - 1) // 2]
    step = max(cfg.model.l_max // 32, 1)
    grid = list(range(0, cfg.model.l_max + 1, step))
    curve = reward_curve(median_report, grid)
    files.write_csv(
        out / "reward_curve.csv",
        ["token_len", "reward_correct", "reward_incorrect"],
        [(x, f"{rc:.6f}", f"{ri:.6f}") for x, rc, ri in curve],
    )

    # 4. toy policy training; start each bin at its observed mean length
    bins = {q.id: q.difficulty_label for q in dataset.questions}
    init_theta = {row.level: math.log(row.mean_token_len) for row in trend}
    sim_cfg = SimPOConfig(
        beta=cfg.beta, gamma=cfg.gamma, learning_rate=cfg.learning_rate, epochs=cfg.epochs
    )
    result = train_toy(pairs, bins, sim_cfg, init_theta=init_theta)
    expected_before = {level: math.exp(t) for level, t in sorted(init_theta.items())}
    expected_after = {level: result.policy.expected_length(level) for level in result.policy.bins()}
    files.write_json(
        out / "theta.json",
        {
            "beta": cfg.beta,
            "gamma": cfg.gamma,
            "theta": {str(level): result.policy.theta[level] for level in result.policy.bins()},
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
            (level, f"{expected_before[level]:.6f}", f"{expected_after[level]:.6f}")
            for level in sorted(expected_before)
        ],
    )

    # 5. baseline vs treated runs at the per-level expected lengths
    accuracy_by_q = {r.question_id: r.p >= 0.5 for r in reports}
    baseline: list[RunRecord] = []
    treated: list[RunRecord] = []
    for q in dataset.questions:
        level = q.difficulty_label
        correct = accuracy_by_q[q.id]
        baseline.append(
            RunRecord(q.id, correct, round(expected_before[level]), difficulty_label=level)
        )
        treated.append(
            RunRecord(q.id, correct, round(expected_after[level]), difficulty_label=level)
        )
    files.write_jsonl(out / "baseline_run.jsonl", (files.run_record_to_dict(r) for r in baseline))
    files.write_jsonl(out / "treated_run.jsonl", (files.run_record_to_dict(r) for r in treated))

    overall = compare(baseline, treated)
    by_level = compare_by_level(baseline, treated)
    files.write_json(out / "metrics_report.json", files.metrics_to_dict(overall))
    files.write_csv(
        out / "metrics_by_level.csv",
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
    cr_by_level = {level: m.cr for level, m in by_level.items()}
    cr_levels = sorted(cr_by_level)
    compression_trend_ok = all(
        cr_by_level[a] >= cr_by_level[b] for a, b in zip(cr_levels, cr_levels[1:])
    )

    # 6. figures
    plots.plot_tlb_by_level(tlb_means, figdir / "tlb_by_level.png")
    plots.plot_reward_curve(curve, median_report.l_budget, figdir / "reward_curve.png")
    plots.plot_loss_trace(result.loss_trace, figdir / "loss_trace.png")
    plots.plot_compression_by_level(cr_by_level, figdir / "compression_by_level.png")

    demo = DemoResult(
        out_dir=out,
        tlb_by_level=tlb_means,
        budget_trend_ok=budget_trend_ok,
        pair_summary=summary,
        expected_before=expected_before,
        expected_after=expected_after,
        cr_by_level=cr_by_level,
        compression_trend_ok=compression_trend_ok,
        overall=overall,
        final_loss=result.loss_trace[-1],
        warnings=warnings,
    )
    _write_summary(out / "summary.md", cfg, demo, trend)
    return demo


def _checkline(label: str, ok: bool) -> str:
    return f"- {label}: {'PASS' if ok else 'FAIL'}"


def _write_summary(path: Path, cfg: DemoConfig, demo: DemoResult, trend) -> None:
    s = demo.pair_summary
    lines = [
        "# Budget preference pipeline demo",
        "",
        f"Seed {cfg.seed}; {len(cfg.model.accuracy)} levels x "
        f"{cfg.questions_per_level} questions x {cfg.samples_per_question} samples; "
        f"delta {cfg.delta}.",
        "",
    ]
    for w in demo.warnings:
        lines += [f"**Warning:** {w}", ""]
    lines += [
        "## Budgets",
        "",
        "| level | mean accuracy | mean length | mean budget |",
        "|---|---|---|---|",
    ]
    for row in trend:
        lines.append(
            f"| {row.level} | {row.mean_accuracy:.3f} | {row.mean_token_len:.1f} "
            f"| {row.mean_tlb:.1f} |"
        )
    lines += [
        "",
        "## Preference pairs",
        "",
        f"{s.total_pairs} pairs: DCP {s.dcp_count} ({s.dcp_pct:.2f}%), "
        f"DICP {s.dicp_count} ({s.dicp_pct:.2f}%), CICP {s.cicp_count}.",
        "",
        "## Training",
        "",
        f"beta {cfg.beta}, gamma {cfg.gamma}, learning rate {cfg.learning_rate}, "
        f"{cfg.epochs} epochs; final loss {demo.final_loss:.6f}.",
        "",
        "| level | expected length before | after | compression |",
        "|---|---|---|---|",
    ]
    for level in sorted(demo.expected_before):
        before = demo.expected_before[level]
        after = demo.expected_after[level]
        lines.append(f"| {level} | {before:.1f} | {after:.1f} | {100.0 * (1 - after / before):.1f}% |")
    lines += [
        "",
        "## Trend checks",
        "",
        _checkline("budget rises strictly with difficulty level", demo.budget_trend_ok),
        _checkline(
            "per-level compression ratio non-increasing with difficulty",
            demo.compression_trend_ok,
        ),
        "",
        "Figures: `figures/tlb_by_level.png`, `figures/reward_curve.png`, "
        "`figures/loss_trace.png`, `figures/compression_by_level.png`.",
        "",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines))
