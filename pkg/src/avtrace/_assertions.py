"""Assertion helpers for loss bookkeeping and evaluation results."""

from __future__ import annotations

import math

from avtrace.config import LossWeights
from avtrace.models import LossBreakdown, MetricsReport


class LossCompositionError(AssertionError):
    """A logged total disagrees with its weighted components."""

    def __init__(self, breakdown: LossBreakdown, expected: float, message: str = "") -> None:
        self.breakdown = breakdown
        self.expected = expected
        detail = (
            f"total {breakdown.total!r} != weighted sum {expected!r} "
            f"(det={breakdown.det}, attr={breakdown.attr}, cont={breakdown.cont}, "
            f"fp={breakdown.fp}, cen={breakdown.cen})"
        )
        super().__init__(f"{message}\n{detail}" if message else detail)


class MetricsAssertionError(AssertionError):
    """Rich assertion error carrying the report summary."""

    def __init__(self, report: MetricsReport, failures: list[str], message: str = "") -> None:
        self.report = report
        self.failures = failures
        detail = "; ".join(failures) + "\n" + report.summary()
        super().__init__(f"{message}\n{detail}" if message else detail)


def assert_loss_composition(
    breakdown: LossBreakdown, weights: LossWeights, *, tolerance: float = 1e-6, message: str = ""
) -> None:
    """Assert ``total == det + λa·attr + λc·cont + λf·fp + λr·cen`` (relative and absolute ``tolerance``).

    Usage:
        for record in step_records:
            assert_loss_composition(record, config.loss)
    """
    expected = breakdown.composed(weights)
    if not math.isclose(breakdown.total, expected, rel_tol=tolerance, abs_tol=tolerance):
        raise LossCompositionError(breakdown, expected, message)


def assert_metrics(report: MetricsReport, *, message: str = "", **minimums: float) -> None:
    """Assert every named metric is defined and at least its minimum.

    Usage:
        assert_metrics(report, balanced_accuracy=0.95, attribution_accuracy=0.8)
    """
    failures = []
    for name, minimum in minimums.items():
        value = getattr(report, name)
        if value is None:
            failures.append(f"{name} is undefined")
        elif value < minimum:
            failures.append(f"{name} = {value:.4f} < {minimum}")
    if failures:
        raise MetricsAssertionError(report, failures, message)
