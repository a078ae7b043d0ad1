"""Figures: score histograms, similarity bars, ROC curves, confusion matrices, ablation tables.

Every figure is rendered to a temporary file and renamed into place, so a
failed render never leaves a partial output behind.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from avtrace.evaluators.ablation import METRIC_COLUMNS  # noqa: E402
from avtrace.evaluators.metrics import roc_points  # noqa: E402
from avtrace.models import AblationComparison, MetricsReport, SimilarityStats  # noqa: E402
from avtrace.report.terminal import METRIC_LABELS, ablation_cells, render_ablation_table  # noqa: E402

PLOT_KINDS = ("score_hist", "similarity_bars", "ablation_table", "roc", "confusion")
_TEXT_SUFFIXES = {"", ".txt", ".md"}


def _save(fig: Figure, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_name(f".{p.name}.tmp{p.suffix}")
    try:
        fig.tight_layout()
        fig.savefig(tmp, dpi=120, format=p.suffix.lstrip(".") or "png")
        tmp.replace(p)
    finally:
        plt.close(fig)
        tmp.unlink(missing_ok=True)
    return p


def _label(names: dict[int, str], g: int) -> str:
    return names.get(g, "real" if g == 0 else f"gen{g}")


def score_histogram(y: np.ndarray, detect_prob: np.ndarray, path: str | Path, *, bins: int = 20) -> Path:
    """Detection score distribution of real and fake clips."""
    fig, ax = plt.subplots(figsize=(6, 4))
    edges = np.linspace(0.0, 1.0, bins + 1)
    for label, colour, name in ((0, "tab:blue", "real"), (1, "tab:red", "fake")):
        scores = detect_prob[y == label]
        if scores.size:
            ax.hist(scores, bins=edges, alpha=0.6, color=colour, label=f"{name} (n={scores.size})")
    ax.set_xlabel("detection score")
    ax.set_ylabel("clips")
    ax.set_xlim(0.0, 1.0)
    ax.legend()
    return _save(fig, path)


def similarity_bars(stats: dict[int, SimilarityStats], path: str | Path, names: dict[int, str] | None = None) -> Path:
    """One bar per generator class: mean visual-audio cosine with a standard-deviation whisker."""
    names = names or {}
    classes = sorted(stats)
    fig, ax = plt.subplots(figsize=(1.2 * len(classes) + 2, 4))
    ax.bar(
        [_label(names, g) for g in classes],
        [stats[g].mean for g in classes],
        yerr=[stats[g].std for g in classes],
        capsize=4,
        color=["tab:blue" if g == 0 else "tab:red" for g in classes],
    )
    ax.set_ylabel("cosine(p_v, p_a)")
    ax.set_ylim(-1.0, 1.0)
    ax.axhline(0.0, color="black", lw=0.5)
    return _save(fig, path)


def roc_figure(
    y: np.ndarray, g: np.ndarray, detect_prob: np.ndarray, path: str | Path, names: dict[int, str] | None = None
) -> Path:
    """Overall ROC curve plus one curve per generator against the reals."""
    names = names or {}
    fig, ax = plt.subplots(figsize=(5, 5))
    overall = roc_points(y, detect_prob)
    if overall is not None:
        ax.plot(*overall, color="black", lw=2, label="all")
    for k in sorted(set(g.tolist()) - {0}):
        mask = (g == 0) | (g == k)
        curve = roc_points(y[mask], detect_prob[mask])
        if curve is not None:
            ax.plot(*curve, lw=1, label=_label(names, k))
    ax.plot([0, 1], [0, 1], "k--", lw=0.8)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.legend(loc="lower right")
    return _save(fig, path)


def confusion_figure(report: MetricsReport, path: str | Path) -> Path:
    """Attribution confusion matrix with counts in each cell."""
    matrix = np.asarray(report.attr_confusion)
    labels = [_label(report.generator_names, k) for k in range(matrix.shape[0])]
    fig, ax = plt.subplots(figsize=(1.0 * len(labels) + 2, 1.0 * len(labels) + 1.5))
    ax.imshow(matrix, cmap="Blues")
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            colour = "white" if matrix[i, j] > matrix.max() / 2 else "black"
            ax.text(j, i, str(matrix[i, j]), ha="center", va="center", color=colour)
    ax.set_xticks(range(len(labels)), labels, rotation=45, ha="right")
    ax.set_yticks(range(len(labels)), labels)
    ax.set_xlabel("predicted generator")
    ax.set_ylabel("true generator")
    return _save(fig, path)


def ablation_table(comparison: AblationComparison, path: str | Path) -> Path:
    """Text table for ``.txt``/``.md`` (or no suffix), otherwise a rendered table figure."""
    p = Path(path)
    if p.suffix.lower() in _TEXT_SUFFIXES:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(render_ablation_table(comparison) + "\n", encoding="utf-8")
        return p
    cells = ablation_cells(comparison)
    labels = ["Variant", *(METRIC_LABELS[c] for c in METRIC_COLUMNS)]
    fig, ax = plt.subplots(figsize=(1.1 * len(labels) + 1.0, 0.35 * len(cells) + 1.2))
    ax.axis("off")
    table = ax.table(cellText=cells, colLabels=labels, loc="center", cellLoc="center")
    table.auto_set_font_size(False)
    table.set_fontsize(9)
    table.scale(1.0, 1.3)
    ax.set_title(f"percent; deltas in points against '{comparison.baseline}'", fontsize=9)
    return _save(fig, p)
