"""Reporting: terminal text and figures."""

from avtrace.report.plots import (
    PLOT_KINDS,
    ablation_table,
    confusion_figure,
    roc_figure,
    score_histogram,
    similarity_bars,
)
from avtrace.report.terminal import METRIC_LABELS, TerminalReporter, ablation_cells, render_ablation_table

__all__ = [
    "METRIC_LABELS",
    "PLOT_KINDS",
    "TerminalReporter",
    "ablation_cells",
    "ablation_table",
    "confusion_figure",
    "render_ablation_table",
    "roc_figure",
    "score_histogram",
    "similarity_bars",
]
