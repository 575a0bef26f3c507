"""Figure rendering for experiment reports.

Each experiment command writes its figure next to the CSV it renders,
same stem, .png extension.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def figure_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")


def plot_success_curve(rows: list, out_path) -> Path:
    """Detection probabilities against the iteration budget."""
    n = [r[0] for r in rows]
    pi_suc = [r[4] for r in rows]
    p_y = [r[5] for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(n, pi_suc, "o-", color="tab:red", label="goal state detected")
    ax.plot(n, p_y, "s--", color="tab:blue", label="whole witness path in tree")
    ax.set_xlabel("iteration budget")
    ax.set_ylabel("empirical probability")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def plot_compare_bias(detail_rows: list, out_path) -> Path:
    """Iterations to the first plan, biased versus uniform, per seed."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    colors = {"biased": "tab:red", "uniform": "tab:blue"}
    for variant in ("biased", "uniform"):
        pts = [
            (r[1], r[6]) for r in detail_rows
            if r[0] == variant and r[3] == "ok" and r[6] != ""
        ]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], "o",
                    color=colors[variant], label=variant, alpha=0.8)
    ax.set_xlabel("trial")
    ax.set_ylabel("iterations to first plan")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def plot_benchmark(rows: list, out_path) -> Path:
    """Wall time to the first plan per instance (completed trials)."""
    by_instance: dict = {}
    for r in rows:
        if r[5] == "ok":
            by_instance.setdefault(str(r[0]), []).append(float(r[10]) + float(r[11]))
    fig, ax = plt.subplots(figsize=(5.5, 3.4))
    names = list(by_instance)
    if names:
        data = [by_instance[k] for k in names]
        try:
            ax.boxplot(data, tick_labels=names)
        except TypeError:  # older matplotlib spells the kwarg "labels"
            ax.boxplot(data, labels=names)
    ax.set_ylabel("wall ms to first plan")
    ax.grid(True, axis="y", alpha=0.3)
    plt.setp(ax.get_xticklabels(), rotation=20, ha="right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)
