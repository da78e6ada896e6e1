"""Figure style and chart helpers for the scenario report.

All output is SVG with a fixed hash salt and no date stamp, so identical
inputs give identical bytes.
"""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "buildsim",
    "svg.fonttype": "none",
    "font.family": "sans-serif",
    "font.size": 8,
    "axes.titlesize": 9,
    "axes.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "axes.axisbelow": True,
    "grid.linewidth": 0.4,
    "grid.alpha": 0.5,
    "legend.fontsize": 7,
    "legend.frameon": False,
    "xtick.labelsize": 7,
    "ytick.labelsize": 7,
    "lines.linewidth": 0.9,
    "figure.dpi": 100,
}

# one colour per building variant
VARIANT_COLORS = {
    "B1": "#b2182b",
    "B2": "#ef8a62",
    "B3": "#fddbc7",
    "B4": "#2166ac",
    "B5": "#67a9cf",
    "B6": "#d1e5f0",
}


@contextmanager
def style():
    with matplotlib.rc_context(STYLE):
        yield


def save_svg(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return path


def bar_chart(codes, values, ylabel: str, title: str, path):
    """One bar per scenario, coloured by building variant."""
    with style():
        width = max(3.0, 0.18 * len(codes) + 1.0)
        fig, ax = plt.subplots(figsize=(width, 2.6))
        x = np.arange(len(codes))
        colors = [VARIANT_COLORS.get(c[:2], "0.5") for c in codes]
        ax.bar(x, values, color=colors, edgecolor="0.2", linewidth=0.3)
        ax.set_xticks(x)
        ax.set_xticklabels(codes, rotation=90)
        ax.set_xlim(-0.6, len(codes) - 0.4)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.axhline(0.0, color="0.2", linewidth=0.5)
        return save_svg(fig, path)


def line_chart(series: dict, ylabel: str, title: str, path, x_label: str = "day"):
    """Overlay of named ``(x, y)`` series."""
    with style():
        fig, ax = plt.subplots(figsize=(6.0, 2.6))
        prefixes = [name[:2] for name in series]
        by_variant = len(set(prefixes)) == len(prefixes)
        for name, (x, y) in series.items():
            ax.plot(x, y, label=name, color=VARIANT_COLORS.get(name[:2]) if by_variant else None)
        ax.set_xlabel(x_label)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        if len(series) > 1:
            ax.legend(ncol=min(len(series), 4), loc="upper right")
        return save_svg(fig, path)
