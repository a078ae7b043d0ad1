"""Side-by-side comparison of ablation variants."""

from __future__ import annotations

from collections.abc import Mapping

from avtrace.models import AblationComparison, AblationRow, MetricsReport

METRIC_COLUMNS = ("balanced_accuracy", "auc", "f1", "real_accuracy", "fake_accuracy", "attribution_accuracy")


def compare_ablations(reports: Mapping[str, MetricsReport], *, baseline: str | None = None) -> AblationComparison:
    """One row per variant plus each metric's difference from ``baseline``.

    ``baseline`` defaults to ``full`` when present, else the first variant.
    Metrics missing from either side are left absent (None).
    """
    if len(reports) < 2:
        raise ValueError(f"need at least two reports to compare, got {len(reports)}")
    names = list(reports)
    base = baseline or ("full" if "full" in reports else names[0])
    if base not in reports:
        raise ValueError(f"baseline {base!r} not among variants {names}")

    rows = [
        AblationRow(variant=name, **{col: getattr(report, col) for col in METRIC_COLUMNS})
        for name, report in reports.items()
    ]
    deltas: dict[str, dict[str, float | None]] = {}
    for name, report in reports.items():
        deltas[name] = {}
        for col in METRIC_COLUMNS:
            ours, theirs = getattr(report, col), getattr(reports[base], col)
            deltas[name][col] = None if ours is None or theirs is None else ours - theirs
    return AblationComparison(baseline=base, rows=rows, deltas=deltas)
