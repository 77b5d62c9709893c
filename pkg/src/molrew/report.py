"""Trace reporting: delimited output plus rendered figures.

A report directory holds the trace in its line-delimited text form, the
per-cycle statistics table as CSV, and (optionally) matplotlib figures for
the node-count time series and the rule-usage totals.
"""

from __future__ import annotations

import os

from .engine import Trace, stats, stats_csv


def write_report(trace: Trace, outdir: str, figures: bool = False) -> list[str]:
    """Write trace.txt and stats.csv (and PNG figures when asked) into
    outdir; returns the paths written."""
    os.makedirs(outdir, exist_ok=True)
    paths = []

    trace_path = os.path.join(outdir, "trace.txt")
    with open(trace_path, "w") as fh:
        fh.write(trace.render())
    paths.append(trace_path)

    csv_path = os.path.join(outdir, "stats.csv")
    with open(csv_path, "w") as fh:
        fh.write(stats_csv(trace))
    paths.append(csv_path)

    if figures:
        paths.extend(render_figures(trace, outdir))
    return paths


def render_figures(trace: Trace, outdir: str) -> list[str]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    header, rows, totals = stats(trace)
    kind_names = sorted(trace.initial.kinds)
    cycles = [row[0] for row in rows]
    paths = []

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for k in kind_names:
        col = header.index(k)
        series = [row[col] for row in rows]
        if any(series):
            ax.plot(cycles, series, label=k)
    ax.set_xlabel("cycle")
    ax.set_ylabel("node count")
    ax.set_title(f"node counts per kind ({trace.chemistry})")
    ax.legend(loc="upper left", fontsize=8)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    path = os.path.join(outdir, "node_counts.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    if totals:
        fig, ax = plt.subplots(figsize=(8, 4.5))
        names = sorted(totals)
        ax.bar(range(len(names)), [totals[n] for n in names])
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
        ax.set_ylabel("applications")
        ax.set_title("rule usage totals")
        ax.spines["right"].set_visible(False)
        ax.spines["top"].set_visible(False)
        path = os.path.join(outdir, "rule_usage.png")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths
