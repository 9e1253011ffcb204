"""Report figures written next to the tab-delimited CLI output."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .entropy import EntropyReport
from .learner import LearnTrace, trace_entropies

def _new_figure(width=6.4, height=4.0, nrows=1):
    fig = Figure(figsize=(width, height), layout="constrained")
    axes = fig.subplots(nrows, 1, squeeze=False)[:, 0]
    for ax in axes:
        ax.spines[["top", "right"]].set_visible(False)
    return fig, axes


def plot_trace(trace: LearnTrace, path: str | Path, title: str | None = None) -> Path:
    """Network entropy after each accepted arc, and each arc's -log10 p-value."""
    fig, (ax_h, ax_p) = _new_figure(height=5.5, nrows=2)
    steps = np.arange(len(trace.steps) + 1)
    ax_h.plot(steps, trace_entropies(trace), marker="o", color="C0")
    ax_h.set_ylabel("entropy (nats)")
    ax_h.set_title(title or f"{len(trace.steps)} arcs, halt: {trace.halt_reason}")

    if trace.steps:
        pvals = np.array([s.evaluation.p_value for s in trace.steps])
        # underflowed p-values are drawn at the plot ceiling
        score = -np.log10(np.maximum(pvals, 1e-300))
        labels = [f"{trace.names[s.evaluation.src]}>{trace.names[s.evaluation.dst]}"
                  for s in trace.steps]
        ax_p.bar(steps[1:], score, color="C1")
        ax_p.set_xticks(steps[1:], labels, rotation=60, ha="right", fontsize=7)
    ax_p.set_ylabel("-log10 p")
    ax_p.set_xlabel("accepted arc")
    path = Path(path)
    fig.savefig(path, dpi=120)
    return path


def plot_entropy(report: EntropyReport, names: Sequence[str], path: str | Path,
                 title: str | None = None) -> Path:
    """Per-node family contributions to the network entropy."""
    fig, (ax,) = _new_figure(width=max(4.0, 0.25 * len(names) + 2))
    ax.bar(range(len(names)), report.per_node, color="C0")
    ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
    ax.set_ylabel("family entropy (nats)")
    ax.set_title(title or f"total {report.total:.6f} nats")
    path = Path(path)
    fig.savefig(path, dpi=120)
    return path
