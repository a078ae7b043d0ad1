"""Text rendering of metrics reports and ablation comparisons."""

from __future__ import annotations

from avtrace.evaluators.ablation import METRIC_COLUMNS
from avtrace.models import AblationComparison, MetricsReport

METRIC_LABELS = {
    "balanced_accuracy": "Bal.Acc",
    "auc": "AUC",
    "f1": "F1",
    "real_accuracy": "Real",
    "fake_accuracy": "Fake",
    "attribution_accuracy": "Attr",
}


def _pct(value: float | None) -> str:
    return "-" if value is None else f"{100 * value:.1f}"


def _delta(value: float | None) -> str:
    return "" if value is None else f"{100 * value:+.1f}"


def ablation_cells(comparison: AblationComparison) -> list[list[str]]:
    """One row per variant (metrics in percent), each non-baseline row followed by its deltas."""
    cells = []
    for row in comparison.rows:
        cells.append([row.variant, *(_pct(getattr(row, c)) for c in METRIC_COLUMNS)])
        if row.variant != comparison.baseline:
            deltas = comparison.deltas[row.variant]
            cells.append(["", *(_delta(deltas[c]) for c in METRIC_COLUMNS)])
    return cells


def render_ablation_table(comparison: AblationComparison) -> str:
    """Variants as rows, metrics as columns, with deltas against the baseline underneath."""
    cells = ablation_cells(comparison)
    width = max(len("Variant"), *(len(row[0]) for row in cells))
    header = f"{'Variant':<{width}}  " + "  ".join(f"{METRIC_LABELS[c]:>8}" for c in METRIC_COLUMNS)
    lines = [header, "-" * len(header)]
    for variant, *values in cells:
        lines.append(f"{variant:<{width}}  " + "  ".join(f"{v:>8}" for v in values))
    lines.append("-" * len(header))
    lines.append(f"deltas in points against '{comparison.baseline}'; '-' marks an undefined metric")
    return "\n".join(lines)


class TerminalReporter:
    """Collects named metrics reports and formats them for terminal output."""

    def __init__(self) -> None:
        self.results: list[tuple[str, MetricsReport]] = []

    def add(self, name: str, report: MetricsReport) -> None:
        self.results.append((name, report))

    @property
    def total(self) -> int:
        return len(self.results)

    def summary(self) -> str:
        if not self.results:
            return "No reports collected."
        lines = ["", "=" * 60, "AVTRACE EVALUATION", "=" * 60]
        for name, report in self.results:
            lines.append(f"[{name}]")
            lines.append(report.summary())
            lines.append("-" * 60)
        return "\n".join(lines)
