"""Figures written next to the CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_stats(rows: list[dict], path: Path) -> Path:
    """Per-layer node/edge/community counts and average community size."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3))
        names = [r["layer"] for r in rows]
        x = range(len(names))
        w = 0.27
        for k, key in enumerate(("nodes", "edges", "communities")):
            ax1.bar([i + (k - 1) * w for i in x], [r[key] for r in rows], w, label=key)
        ax1.set_xticks(list(x), names)
        ax1.set_yscale("symlog")
        ax1.legend(frameon=False)
        ax1.set_title("Layer statistics")
        ax2.bar(names, [r["avg_size"] for r in rows], color="0.4")
        ax2.set_title("Avg. community size")
        return _save(fig, path)


def plot_bench(rows, path: Path) -> Path:
    """Bar chart of one-time detection costs against per-step composition costs."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3))
        labels = [f"{r.phase}\n{r.name}" for r in rows]
        colors = ["tab:blue" if r.phase == "psi" else "tab:orange" for r in rows]
        ax.bar(range(len(rows)), [r.seconds for r in rows], color=colors)
        ax.set_xticks(range(len(rows)), labels, fontsize=7)
        ax.set_ylabel("seconds")
        ax.set_title("Community detection vs. composition time")
        return _save(fig, path)
