"""Metrics, inference and ablation comparison."""

from avtrace.evaluators.ablation import METRIC_COLUMNS, compare_ablations
from avtrace.evaluators.inference import (
    cross_modal_similarity,
    evaluate,
    export_embeddings,
    read_predictions,
    read_similarity,
    report_from_predictions,
    run_inference,
    similarity_by_generator,
    write_embeddings,
    write_predictions,
    write_similarity,
)
from avtrace.evaluators.metrics import auc, compute_metrics, roc_points
from avtrace.evaluators.predict import REPRESENTATIONS, Predictions, predict

__all__ = [
    "METRIC_COLUMNS",
    "REPRESENTATIONS",
    "Predictions",
    "auc",
    "compare_ablations",
    "compute_metrics",
    "cross_modal_similarity",
    "evaluate",
    "export_embeddings",
    "predict",
    "read_predictions",
    "read_similarity",
    "report_from_predictions",
    "roc_points",
    "run_inference",
    "similarity_by_generator",
    "write_embeddings",
    "write_predictions",
    "write_similarity",
]
