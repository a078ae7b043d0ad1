"""Checkpoint-level evaluation: metrics, cross-modal similarity, embedding export."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from avtrace._cache import ArrayCache
from avtrace._errors import ConfigError, ManifestError
from avtrace._protocols import MediaReader
from avtrace.checkpoint import Checkpoint, load_checkpoint
from avtrace.datapipe import ClipDataset
from avtrace.evaluators.metrics import compute_metrics
from avtrace.evaluators.predict import REPRESENTATIONS, Predictions, predict
from avtrace.models import DatasetManifest, MetricsReport, SimilarityStats, Split

logger = logging.getLogger("avtrace.evaluators")


def _as_checkpoint(checkpoint: Checkpoint | str | Path) -> Checkpoint:
    return checkpoint if isinstance(checkpoint, Checkpoint) else load_checkpoint(checkpoint)


def run_inference(
    checkpoint: Checkpoint | str | Path,
    manifest: DatasetManifest,
    *,
    split: Split | None = None,
    silent_audio: bool = False,
    batch_size: int | None = None,
    reader: MediaReader | None = None,
    cache: ArrayCache | None = None,
) -> Predictions:
    """Predictions for every clip of ``split``; media errors are fatal here.

    ``silent_audio`` replaces every audio track with silence, the protocol
    for datasets that ship without audio.
    """
    ckpt = _as_checkpoint(checkpoint)
    split = split or ckpt.config.eval.split
    if not manifest.split(split):
        raise ManifestError(f"split {split!r} is empty")
    if manifest.num_classes != ckpt.num_classes:
        raise ManifestError(
            f"manifest has {manifest.num_classes} classes, checkpoint was trained with {ckpt.num_classes}"
        )
    dataset = ClipDataset(
        manifest,
        split,
        ckpt.config.data,
        augment=False,
        strict=True,
        reader=reader,
        cache=cache,
        silent_audio=silent_audio,
    )
    return predict(
        ckpt.model,
        dataset,
        batch_size=batch_size or ckpt.config.eval.batch_size,
        num_workers=ckpt.config.data.num_workers,
    )


def report_from_predictions(
    predictions: Predictions, *, threshold: float, split: str, generator_names: dict[int, str]
) -> MetricsReport:
    return compute_metrics(
        predictions.y,
        predictions.g,
        predictions.detect_prob,
        predictions.attr_probs,
        threshold=threshold,
        split=split,
        generator_names=generator_names,
    )


def evaluate(
    checkpoint: Checkpoint | str | Path,
    manifest: DatasetManifest,
    *,
    threshold: float | None = None,
    split: Split | None = None,
    silent_audio: bool = False,
    reader: MediaReader | None = None,
    cache: ArrayCache | None = None,
) -> MetricsReport:
    """Eval-mode metrics for one split. ``threshold`` and ``split`` default to the run config."""
    ckpt = _as_checkpoint(checkpoint)
    split = split or ckpt.config.eval.split
    predictions = run_inference(ckpt, manifest, split=split, silent_audio=silent_audio, reader=reader, cache=cache)
    return report_from_predictions(
        predictions,
        threshold=ckpt.config.eval.threshold if threshold is None else threshold,
        split=split,
        generator_names=manifest.generator_names,
    )


def similarity_by_generator(p_v: np.ndarray, p_a: np.ndarray, g: np.ndarray) -> dict[int, SimilarityStats]:
    """Mean and (population) standard deviation of cos(p_v, p_a) per generator class.

    Rows are unit vectors, so the cosine is their dot product.
    """
    cosines = np.einsum("ij,ij->i", np.asarray(p_v, np.float64), np.asarray(p_a, np.float64))
    g = np.asarray(g)
    stats = {}
    for k in sorted(np.unique(g).tolist()):
        values = cosines[g == k]
        stats[int(k)] = SimilarityStats(mean=float(values.mean()), std=float(values.std()), count=int(values.size))
    return stats


def cross_modal_similarity(
    checkpoint: Checkpoint | str | Path,
    manifest: DatasetManifest,
    *,
    split: Split | None = None,
    reader: MediaReader | None = None,
    cache: ArrayCache | None = None,
) -> dict[int, SimilarityStats]:
    predictions = run_inference(checkpoint, manifest, split=split, reader=reader, cache=cache)
    return similarity_by_generator(predictions.embeddings["p_v"], predictions.embeddings["p_a"], predictions.g)


def write_similarity(stats: dict[int, SimilarityStats], path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps({str(g): s.to_dict() for g, s in stats.items()}, indent=2))
    return p


def read_similarity(path: str | Path) -> dict[int, SimilarityStats]:
    payload = json.loads(Path(path).read_text())
    return {int(g): SimilarityStats.model_validate(s) for g, s in payload.items()}


def write_embeddings(predictions: Predictions, which: str, path: str | Path) -> Path:
    """Header line, then one tab-separated row per clip: source_id, y, g, vector (6 significant digits)."""
    if which not in REPRESENTATIONS:
        raise ConfigError(f"unknown representation {which!r}; expected one of {list(REPRESENTATIONS)}")
    vectors = predictions.embeddings[which]
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    header = "\t".join(["source_id", "y", "g", *(f"{which}_{i}" for i in range(vectors.shape[1]))])
    lines = [header]
    for sid, y, g, row in zip(predictions.source_ids, predictions.y, predictions.g, vectors):
        lines.append("\t".join([sid, str(int(y)), str(int(g)), *(f"{v:.6g}" for v in row)]))
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


def export_embeddings(
    checkpoint: Checkpoint | str | Path,
    manifest: DatasetManifest,
    which: str,
    out_path: str | Path,
    *,
    split: Split | None = None,
    reader: MediaReader | None = None,
    cache: ArrayCache | None = None,
) -> Path:
    if which not in REPRESENTATIONS:
        raise ConfigError(f"unknown representation {which!r}; expected one of {list(REPRESENTATIONS)}")
    predictions = run_inference(checkpoint, manifest, split=split, reader=reader, cache=cache)
    path = write_embeddings(predictions, which, out_path)
    logger.info("Exported %d %s vectors to %s", len(predictions), which, path)
    return path


def write_predictions(predictions: Predictions, path: str | Path) -> Path:
    """Per-clip TSV: source_id, y, g, detect_prob, attr_pred."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    attr_pred = predictions.attr_probs.argmax(axis=1)
    lines = ["source_id\ty\tg\tdetect_prob\tattr_pred"]
    for sid, y, g, prob, pred in zip(
        predictions.source_ids, predictions.y, predictions.g, predictions.detect_prob, attr_pred
    ):
        lines.append(f"{sid}\t{int(y)}\t{int(g)}\t{prob:.6g}\t{int(pred)}")
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


def read_predictions(path: str | Path) -> dict[str, np.ndarray]:
    """Columns of a predictions file as arrays (``y``, ``g``, ``detect_prob``, ``attr_pred``)."""
    rows = [line.split("\t") for line in Path(path).read_text(encoding="utf-8").splitlines()[1:] if line]
    if not rows:
        raise ValueError(f"{path}: no predictions")
    return {
        "y": np.array([int(r[1]) for r in rows]),
        "g": np.array([int(r[2]) for r in rows]),
        "detect_prob": np.array([float(r[3]) for r in rows]),
        "attr_pred": np.array([int(r[4]) for r in rows]),
    }
