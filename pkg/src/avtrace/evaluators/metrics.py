"""Detection and attribution metrics."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from sklearn.metrics import confusion_matrix, f1_score, roc_auc_score, roc_curve

from avtrace.models import MetricsReport

logger = logging.getLogger("avtrace.evaluators")


def auc(scores_real: Sequence[float] | np.ndarray, scores_fake: Sequence[float] | np.ndarray) -> float | None:
    """Probability that a fake outscores a real, ties counting one half.

    Returns None when either side is empty (the AUC is undefined).
    """
    real = np.asarray(scores_real, dtype=np.float64).reshape(-1)
    fake = np.asarray(scores_fake, dtype=np.float64).reshape(-1)
    if real.size == 0 or fake.size == 0:
        return None
    labels = np.concatenate([np.zeros(real.size), np.ones(fake.size)])
    return float(roc_auc_score(labels, np.concatenate([real, fake])))


def roc_points(y: np.ndarray, detect_prob: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """(false positive rate, true positive rate) along the ROC curve, or None if a class is missing."""
    if len(np.unique(y)) < 2:
        return None
    fpr, tpr, _ = roc_curve(y, detect_prob)
    return fpr, tpr


def _recall(matrix: np.ndarray, row: int) -> float | None:
    support = int(matrix[row].sum())
    return None if support == 0 else float(matrix[row, row]) / support


def compute_metrics(
    y: np.ndarray,
    g: np.ndarray,
    detect_prob: np.ndarray,
    attr_probs: np.ndarray,
    *,
    threshold: float = 0.5,
    split: str = "test",
    generator_names: dict[int, str] | None = None,
) -> MetricsReport:
    """Fill a MetricsReport from per-sample labels and predictions.

    A sample is called fake when ``detect_prob >= threshold``; its generator
    is the argmax of ``attr_probs`` (columns are classes 0..G).
    """
    y = np.asarray(y, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    detect_prob = np.asarray(detect_prob, dtype=np.float64)
    attr_probs = np.asarray(attr_probs, dtype=np.float64)
    if y.size == 0:
        raise ValueError("cannot compute metrics on an empty split")
    num_classes = attr_probs.shape[1]
    diagnostics: list[str] = []

    predicted = (detect_prob >= threshold).astype(np.int64)
    detect_cm = confusion_matrix(y, predicted, labels=[0, 1])
    real_accuracy = _recall(detect_cm, 0)
    fake_accuracy = _recall(detect_cm, 1)
    balanced = None
    if real_accuracy is not None and fake_accuracy is not None:
        balanced = (real_accuracy + fake_accuracy) / 2
    else:
        diagnostics.append("split lacks one detection class; balanced accuracy is undefined")

    overall_auc = auc(detect_prob[y == 0], detect_prob[y == 1])
    if overall_auc is None:
        logger.warning("AUC undefined on split %r: only one detection class present", split)
        diagnostics.append("split lacks one detection class; AUC is undefined")

    attr_pred = attr_probs.argmax(axis=1)
    attr_cm = confusion_matrix(g, attr_pred, labels=list(range(num_classes)))

    per_generator: dict[int, float] = {}
    per_generator_auc: dict[int, float] = {}
    for k in sorted(np.unique(g).tolist()):
        mask = g == k
        per_generator[k] = float((predicted[mask] == int(k >= 1)).mean())
        if k >= 1:
            gen_auc = auc(detect_prob[g == 0], detect_prob[mask])
            if gen_auc is not None:
                per_generator_auc[k] = gen_auc

    return MetricsReport(
        balanced_accuracy=balanced,
        auc=overall_auc,
        f1=float(f1_score(y, predicted, labels=[0, 1], pos_label=1, zero_division=0.0)),
        real_accuracy=real_accuracy,
        fake_accuracy=fake_accuracy,
        attribution_accuracy=float(np.trace(attr_cm)) / y.size,
        detect_confusion=detect_cm.tolist(),
        attr_confusion=attr_cm.tolist(),
        per_generator_detection=per_generator,
        per_generator_auc=per_generator_auc,
        threshold=threshold,
        num_samples=int(y.size),
        split=split,
        generator_names=generator_names or {},
        diagnostics=diagnostics,
    )
