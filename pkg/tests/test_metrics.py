"""Tests for detection/attribution metrics, similarity statistics, embedding export and ablation tables."""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from avtrace._assertions import MetricsAssertionError, assert_metrics
from avtrace._errors import ConfigError, ManifestError
from avtrace.datapipe import build_manifest
from avtrace.evaluators import (
    Predictions,
    auc,
    compare_ablations,
    compute_metrics,
    cross_modal_similarity,
    evaluate,
    export_embeddings,
    read_predictions,
    read_similarity,
    roc_points,
    run_inference,
    similarity_by_generator,
    write_embeddings,
    write_predictions,
    write_similarity,
)
from avtrace.models import DatasetManifest, MetricsReport
from avtrace.training import TrainResult


def _brute_force_auc(real: np.ndarray, fake: np.ndarray) -> float:
    wins = sum(1.0 if f > r else 0.5 if f == r else 0.0 for r, f in itertools.product(real, fake))
    return wins / (len(real) * len(fake))


def _one_hot(g: np.ndarray, num_classes: int) -> np.ndarray:
    return np.eye(num_classes)[g]


def _report(**overrides: object) -> MetricsReport:
    y = np.array([0, 0, 1, 1])
    g = np.array([0, 0, 1, 2])
    prob = np.array([0.1, 0.6, 0.7, 0.9])
    return compute_metrics(y, g, prob, _one_hot(g, 3), **overrides)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# AUC
# ---------------------------------------------------------------------------
class TestAUC:
    @pytest.mark.parametrize(
        ("real", "fake", "expected"),
        [
            ([0.1, 0.2], [0.8, 0.9], 1.0),
            ([0.1, 0.9], [0.5, 0.8], 0.5),
            ([0.5, 0.5], [0.5, 0.5, 0.5], 0.5),
            ([0.9], [0.1], 0.0),
        ],
    )
    def test_examples(self, real: list[float], fake: list[float], expected: float) -> None:
        assert auc(real, fake) == pytest.approx(expected, abs=1e-12)

    def test_matches_pair_counting(self) -> None:
        """Rank-based AUC agrees with counting ordered pairs."""
        rng = np.random.default_rng(0)
        for _ in range(100):
            real = np.round(rng.random(rng.integers(1, 12)), 1)
            fake = np.round(rng.random(rng.integers(1, 12)), 1)
            assert auc(real, fake) == pytest.approx(_brute_force_auc(real, fake), abs=1e-12)

    def test_empty_side_is_undefined(self) -> None:
        """AUC needs both a positive and a negative."""
        assert auc([], [0.3]) is None
        assert auc([0.3], []) is None

    def test_roc_points(self) -> None:
        points = roc_points(np.array([0, 1]), np.array([0.2, 0.8]))
        assert points is not None
        fpr, tpr = points
        assert fpr[0] == 0.0 and tpr[-1] == 1.0
        assert roc_points(np.array([1, 1]), np.array([0.2, 0.8])) is None


# ---------------------------------------------------------------------------
# MetricsReport
# ---------------------------------------------------------------------------
class TestComputeMetrics:
    def test_nearly_perfect_full_model(self) -> None:
        y = np.array([0] * 75 + [1] * 145)
        g = np.array([0] * 75 + [1] * 50 + [2] * 50 + [3] * 45)
        prob = np.where(y == 1, 0.9, 0.1)
        prob[-1] = 0.2
        report = compute_metrics(y, g, prob, _one_hot(g, 4))
        assert report.real_accuracy == 1.0
        assert report.fake_accuracy == pytest.approx(144 / 145)
        assert report.balanced_accuracy == pytest.approx((1.0 + 144 / 145) / 2)
        assert round(100 * report.balanced_accuracy, 1) == 99.7  # type: ignore[operator]
        assert report.detect_confusion == [[75, 0], [1, 144]]

    def test_perfect_predictions(self) -> None:
        """Every metric is 1 for a perfect classifier."""
        y = np.array([0, 0, 1, 1, 1])
        g = np.array([0, 0, 1, 2, 2])
        report = compute_metrics(y, g, y.astype(float), _one_hot(g, 3))
        for name in ("balanced_accuracy", "auc", "f1", "real_accuracy", "fake_accuracy", "attribution_accuracy"):
            assert getattr(report, name) == 1.0, name
        assert report.attr_confusion == [[2, 0, 0], [0, 1, 0], [0, 0, 2]]
        assert report.per_generator_detection == {0: 1.0, 1: 1.0, 2: 1.0}
        assert report.per_generator_auc == {1: 1.0, 2: 1.0}

    def test_always_real(self) -> None:
        """Predicting real everywhere gives chance balanced accuracy and an F1 of 0."""
        y = np.array([0, 0, 1, 1])
        g = np.array([0, 0, 1, 1])
        report = compute_metrics(y, g, np.zeros(4), _one_hot(np.zeros(4, dtype=int), 2))
        assert report.balanced_accuracy == 0.5
        assert report.f1 == 0.0

    def test_identities_from_confusion_counts(self) -> None:
        rng = np.random.default_rng(3)
        g = rng.integers(0, 4, 200)
        y = (g >= 1).astype(int)
        prob = np.clip(0.5 * y + 0.6 * rng.random(200) - 0.05, 0, 1)
        attr = rng.random((200, 4))
        report = compute_metrics(y, g, prob, attr)
        (tn, fp), (fn, tp) = report.detect_confusion
        assert report.real_accuracy == tn / (tn + fp)
        assert report.fake_accuracy == tp / (tp + fn)
        assert report.balanced_accuracy == pytest.approx((tn / (tn + fp) + tp / (tp + fn)) / 2, abs=1e-15)
        precision, recall = tp / (tp + fp), tp / (tp + fn)
        assert report.f1 == pytest.approx(2 * precision * recall / (precision + recall), abs=1e-12)
        diagonal = sum(report.attr_confusion[k][k] for k in range(4))
        assert report.attribution_accuracy == diagonal / 200
        assert sum(map(sum, report.detect_confusion)) == report.num_samples == 200

    def test_missing_class(self, caplog: pytest.LogCaptureFixture) -> None:
        """A class absent from the split has no recall."""
        y = np.array([1, 1, 1])
        g = np.array([1, 2, 2])
        report = compute_metrics(y, g, np.array([0.9, 0.8, 0.3]), _one_hot(g, 3))
        assert report.auc is None
        assert report.balanced_accuracy is None
        assert report.real_accuracy is None
        assert report.fake_accuracy == pytest.approx(2 / 3)
        assert any("AUC is undefined" in d for d in report.diagnostics)
        assert "AUC undefined" in caplog.text

    def test_threshold_monotone(self) -> None:
        rng = np.random.default_rng(7)
        g = rng.integers(0, 3, 100)
        y = (g >= 1).astype(int)
        prob = rng.random(100)
        positives = []
        for threshold in np.linspace(0, 1, 21):
            report = compute_metrics(y, g, prob, rng.random((100, 3)), threshold=float(threshold))
            positives.append(report.detect_confusion[0][1] + report.detect_confusion[1][1])
        assert all(a >= b for a, b in zip(positives, positives[1:]))

    def test_threshold_is_inclusive(self) -> None:
        """A score equal to the threshold is classified fake."""
        report = _report(threshold=0.6)
        assert report.detect_confusion == [[1, 1], [0, 2]]
        assert report.threshold == 0.6

    def test_empty_split(self) -> None:
        """Evaluating an empty split is refused."""
        with pytest.raises(ValueError, match="empty"):
            compute_metrics(np.array([]), np.array([]), np.array([]), np.zeros((0, 3)))

    def test_report_validates_counts(self) -> None:
        payload = _report().to_dict()
        payload["num_samples"] = 5
        with pytest.raises(ValidationError, match="do not sum"):
            MetricsReport.from_dict(payload)

    def test_report_validates_balanced_accuracy(self) -> None:
        """Balanced accuracy must equal the mean of per-class recall."""
        payload = _report().to_dict()
        payload["balanced_accuracy"] = 0.1
        with pytest.raises(ValidationError, match="mean of real and fake"):
            MetricsReport.from_dict(payload)

    def test_summary_names_generators(self) -> None:
        """The summary lists recall under generator names."""
        report = _report(generator_names={0: "real", 1: "faceswap", 2: "wav2lip"})
        text = report.summary()
        assert "faceswap" in text and "Bal.Acc 75.0%" in text

    def test_assert_metrics(self) -> None:
        report = _report()
        assert_metrics(report, balanced_accuracy=0.7, attribution_accuracy=1.0)
        with pytest.raises(MetricsAssertionError, match="balanced_accuracy"):
            assert_metrics(report, balanced_accuracy=0.9)


# ---------------------------------------------------------------------------
# Ablation comparison
# ---------------------------------------------------------------------------
class TestCompareAblations:
    def test_identical_reports_have_zero_deltas(self) -> None:
        """A report compared with itself has all-zero deltas."""
        comparison = compare_ablations({"full": _report(), "w/o attr": _report()})
        assert comparison.baseline == "full"
        assert all(v == 0.0 for row in comparison.deltas.values() for v in row.values())

    def test_single_report(self) -> None:
        with pytest.raises(ValueError, match="at least two"):
            compare_ablations({"full": _report()})

    def test_baseline_defaults_to_first(self) -> None:
        """The first report is the baseline unless one is named."""
        comparison = compare_ablations({"a": _report(), "b": _report(threshold=0.65)})
        assert comparison.baseline == "a"
        assert comparison.deltas["b"]["fake_accuracy"] == 0.0
        assert comparison.deltas["b"]["real_accuracy"] == pytest.approx(0.5)

    def test_missing_metric_is_absent(self) -> None:
        y, g = np.array([1, 1]), np.array([1, 2])
        one_sided = compute_metrics(y, g, np.array([0.9, 0.8]), _one_hot(g, 3))
        comparison = compare_ablations({"full": _report(), "fakes only": one_sided})
        assert comparison.deltas["fakes only"]["auc"] is None
        assert comparison.deltas["fakes only"]["attribution_accuracy"] == 0.0
        row = next(r for r in comparison.rows if r.variant == "fakes only")
        assert row.balanced_accuracy is None

    def test_unknown_baseline(self) -> None:
        """Naming a baseline that is not in the list is an error."""
        with pytest.raises(ValueError, match="baseline"):
            compare_ablations({"a": _report(), "b": _report()}, baseline="c")


# ---------------------------------------------------------------------------
# Cross-modal similarity
# ---------------------------------------------------------------------------
class TestSimilarity:
    def test_self_similarity(self) -> None:
        """Every row is similar to itself with cosine 1."""
        rng = np.random.default_rng(0)
        p = rng.normal(size=(6, 8))
        p /= np.linalg.norm(p, axis=1, keepdims=True)
        stats = similarity_by_generator(p, p, np.array([0, 0, 1, 1, 2, 2]))
        assert set(stats) == {0, 1, 2}
        for s in stats.values():
            assert s.mean == pytest.approx(1.0, abs=1e-12)
            assert s.std == pytest.approx(0.0, abs=1e-7)
            assert s.count == 2

    def test_orthogonal_pairs(self) -> None:
        eye = np.eye(4)
        stats = similarity_by_generator(eye[:2], eye[2:], np.array([1, 1]))
        assert stats[1].mean == 0.0

    def test_random_pairs(self) -> None:
        """Random high-dimensional rows are nearly orthogonal."""
        rng = np.random.default_rng(1)
        dim, n = 64, 10_000
        p_v = rng.normal(size=(n, dim))
        p_a = rng.normal(size=(n, dim))
        p_v /= np.linalg.norm(p_v, axis=1, keepdims=True)
        p_a /= np.linalg.norm(p_a, axis=1, keepdims=True)
        stats = similarity_by_generator(p_v, p_a, np.zeros(n, dtype=int))[0]
        assert abs(stats.mean) < 0.01
        assert stats.std == pytest.approx(1 / np.sqrt(dim), rel=0.05)

    def test_write_then_read(self, tmp_path: Path) -> None:
        stats = similarity_by_generator(np.eye(2), np.eye(2), np.array([0, 1]))
        path = write_similarity(stats, tmp_path / "similarity.json")
        assert read_similarity(path) == stats


# ---------------------------------------------------------------------------
# Embedding export and predictions files
# ---------------------------------------------------------------------------
def _predictions() -> Predictions:
    z = np.array([[0.5, -1.25, 1 / 3], [2.0, 0.0, 1e-7]])
    return Predictions(
        source_ids=["a", "b"],
        y=np.array([0, 1]),
        g=np.array([0, 2]),
        detect_prob=np.array([0.25, 0.75]),
        attr_probs=np.array([[0.8, 0.1, 0.1], [0.1, 0.2, 0.7]]),
        embeddings={"z_f": z},
    )


class TestExport:
    def test_embedding_file_format(self, tmp_path: Path) -> None:
        """Header plus one tab-separated row per clip."""
        path = write_embeddings(_predictions(), "z_f", tmp_path / "z.tsv")
        lines = path.read_text().splitlines()
        assert lines[0] == "source_id\ty\tg\tz_f_0\tz_f_1\tz_f_2"
        assert lines[1] == "a\t0\t0\t0.5\t-1.25\t0.333333"
        assert lines[2] == "b\t1\t2\t2\t0\t1e-07"

    def test_unknown_representation(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="unknown representation"):
            write_embeddings(_predictions(), "z_x", tmp_path / "z.tsv")

    def test_predictions_file(self, tmp_path: Path) -> None:
        """Labels, scores and predicted classes read back by column."""
        path = write_predictions(_predictions(), tmp_path / "predictions.tsv")
        columns = read_predictions(path)
        assert columns["y"].tolist() == [0, 1]
        assert columns["attr_pred"].tolist() == [0, 2]
        assert columns["detect_prob"].tolist() == [0.25, 0.75]


# ---------------------------------------------------------------------------
# Checkpoint-level evaluation
# ---------------------------------------------------------------------------
class TestEvaluate:
    def test_report_over_test_split(
        self, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]
    ) -> None:
        _, manifest = synthetic_dataset
        report = evaluate(trained_run.best, manifest)  # type: ignore[arg-type]
        assert report.num_samples == 6
        assert report.split == "test"
        assert len(report.attr_confusion) == 3
        assert report.generator_names == manifest.generator_names

    def test_inference_is_repeatable(
        self, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]
    ) -> None:
        """Evaluation mode is deterministic."""
        _, manifest = synthetic_dataset
        a = run_inference(trained_run.best, manifest)  # type: ignore[arg-type]
        b = run_inference(trained_run.best, manifest)  # type: ignore[arg-type]
        assert np.array_equal(a.detect_prob, b.detect_prob)
        assert a.source_ids == [e.source_id for e in manifest.split("test")]

    def test_silent_audio(self, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]) -> None:
        _, manifest = synthetic_dataset
        report = evaluate(trained_run.best, manifest, silent_audio=True)  # type: ignore[arg-type]
        assert report.num_samples == 6

    def test_export_width_and_rows(
        self, tmp_path: Path, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]
    ) -> None:
        _, manifest = synthetic_dataset
        first = export_embeddings(trained_run.best, manifest, "z_f", tmp_path / "a.tsv")  # type: ignore[arg-type]
        second = export_embeddings(trained_run.best, manifest, "z_f", tmp_path / "b.tsv")  # type: ignore[arg-type]
        lines = first.read_text().splitlines()
        assert len(lines) == 1 + len(manifest.split("test"))
        assert len(lines[1].split("\t")) == 3 + 32
        assert first.read_bytes() == second.read_bytes()

    def test_similarity_per_class(
        self, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]
    ) -> None:
        """Real clips are reported separately from each generator."""
        _, manifest = synthetic_dataset
        stats = cross_modal_similarity(trained_run.best, manifest)  # type: ignore[arg-type]
        assert set(stats) == {0, 1, 2}
        assert all(-1.0 <= s.mean <= 1.0 and s.count == 2 for s in stats.values())

    def test_class_count_mismatch(
        self, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]
    ) -> None:
        _, manifest = synthetic_dataset
        names = {**manifest.generator_names, 3: "extra"}
        wider = build_manifest(manifest.entries, names, root=manifest.root)
        with pytest.raises(ManifestError, match="trained with 3"):
            run_inference(trained_run.best, wider)  # type: ignore[arg-type]

    def test_empty_split(self, trained_run: TrainResult, synthetic_dataset: tuple[Path, DatasetManifest]) -> None:
        """Evaluating an empty split is refused."""
        _, manifest = synthetic_dataset
        train_only = build_manifest(manifest.split("train"), manifest.generator_names, root=manifest.root)
        with pytest.raises(ManifestError, match="'test' is empty"):
            run_inference(trained_run.best, train_only)  # type: ignore[arg-type]
