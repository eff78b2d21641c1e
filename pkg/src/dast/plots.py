"""Figure rendering for pipeline reports. Headless (Agg), PNG output."""

from collections.abc import Mapping, Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

DPI = 150


def plot_tlb_by_level(means: Mapping[int, float], path: str | Path) -> None:
    """Bar chart of mean token length budget per difficulty level."""
    levels = sorted(means)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([str(l) for l in levels], [means[l] for l in levels], color="#4878d0")
    ax.set_xlabel("difficulty level")
    ax.set_ylabel("mean token length budget")
    ax.set_title("Token length budget by difficulty level")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_reward_curve(
    rows: Sequence[tuple[float, float, float]], budget: float, path: str | Path
) -> None:
    """Both reward branches against token length, with the budget marked."""
    xs = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, [r[1] for r in rows], label="correct", color="#2ca02c")
    ax.plot(xs, [r[2] for r in rows], label="incorrect", color="#d62728")
    ax.axvline(budget, color="gray", linestyle="--", linewidth=1, label="budget")
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("token length")
    ax.set_ylabel("calibrated reward")
    ax.set_title("Budget-calibrated reward")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_loss_trace(trace: Sequence[float], path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(trace)), trace, color="#4878d0")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.set_title("Training loss")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_compression_by_level(crs: Mapping[int, float], path: str | Path) -> None:
    """Bar chart of per-level compression ratio (percent)."""
    levels = sorted(crs)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([str(l) for l in levels], [100.0 * crs[l] for l in levels], color="#ee854a")
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("difficulty level")
    ax.set_ylabel("compression ratio (%)")
    ax.set_title("Compression ratio by difficulty level")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
