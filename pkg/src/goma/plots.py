"""Summary figures for suite reports (written alongside metrics.csv)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_COLORS = {
    "single": "#9e9e9e",
    "goma": "#1f77b4",
    "nocomm": "#ff7f0e",
    "heur": "#2ca02c",
    "goalag": "#d62728",
}

_PNG_OPTS = {"dpi": 120, "metadata": {"Software": None}}


def _bar(ax, means: dict, metric: str, title: str) -> None:
    conds = sorted(means)
    vals = [means[c][metric] for c in conds]
    ax.bar(range(len(conds)), vals,
           color=[_COLORS.get(c, "#555555") for c in conds])
    ax.set_xticks(range(len(conds)))
    ax.set_xticklabels(conds, rotation=20)
    ax.set_title(title)
    ax.grid(axis="y", alpha=0.3)


def render_figures(out_dir: Path, summary: dict) -> list[Path]:
    written = []
    for fam, means in sorted(summary["means"].items()):
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
        team = {c: m for c, m in means.items() if c != "single"}
        _bar(axes[0], team, "speedup", f"{fam}: speedup vs single")
        _bar(axes[1], means, "total_cost", f"{fam}: mean total cost")
        fig.tight_layout()
        path = out_dir / f"summary_{fam}.png"
        fig.savefig(path, **_PNG_OPTS)
        plt.close(fig)
        written.append(path)
    return written
