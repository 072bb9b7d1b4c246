"""Figure rendering for scenario reports.

Every plot goes straight to a PNG next to the run's CSV files; nothing
is shown interactively. Helpers stay generic so scenarios only pass
arrays and labels.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_DPI = 150


def _finish(fig, ax, path, title, xlabel, ylabel):
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return Path(path)


def series_figure(path, x, series: dict, title, xlabel, ylabel,
                  logx=False, logy=False, hlines=()) -> Path:
    """Line plot of one or more named series over a common abscissa."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in series.items():
        ax.plot(np.asarray(x), np.asarray(y), label=label, lw=1.4)
    for level, label in hlines:
        ax.axhline(level, color="crimson", ls="--", lw=1.0, label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    return _finish(fig, ax, path, title, xlabel, ylabel)


def loglog_fit_figure(path, x, y, slope, title, xlabel, ylabel,
                      guide_slope=None) -> Path:
    """Scatter on log axes with the fitted power law drawn through it."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(x, y, "o", ms=5, label="measured")
    good = (x > 0) & (y > 0)
    if good.sum() >= 2:
        anchor_x, anchor_y = x[good][0], y[good][0]
        xs = np.array([x[good].min(), x[good].max()])
        ax.loglog(xs, anchor_y * (xs / anchor_x) ** slope, "-",
                  lw=1.2, label=f"fit slope {slope:.3f}")
        if guide_slope is not None:
            ax.loglog(xs, anchor_y * (xs / anchor_x) ** guide_slope, ":",
                      lw=1.2, color="gray", label=f"slope {guide_slope:g} guide")
    return _finish(fig, ax, path, title, xlabel, ylabel)


def trend_family_figure(path, eps, curves: dict, title, ylabel) -> Path:
    """Ratio-versus-epsilon curves, one per labeled cell, log-x."""
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for label, y in curves.items():
        ax.semilogx(np.asarray(eps), np.asarray(y), "o-", ms=3, lw=1.0,
                    label=label)
    return _finish(fig, ax, path, title, "epsilon", ylabel)


def iteration_figure(path, diffs, title) -> Path:
    """Semilog decay of successive Picard differences."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    its = np.arange(1, len(diffs) + 1)
    ax.semilogy(its, np.asarray(diffs), "o-", lw=1.4)
    ax.set_xticks(its)
    return _finish(fig, ax, path, title, "iteration", "sup-t L2 difference")
