from __future__ import annotations

import math
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from avtrace.config import LossWeights

SCHEMA_VERSION = "1.0"

Split = Literal["train", "val", "test"]
SPLITS: tuple[Split, ...] = ("train", "val", "test")


class AvtraceModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "AvtraceModel":
        return cls.model_validate(payload)


# ---------------------------------------------------------------------------
# Dataset manifest
# ---------------------------------------------------------------------------
class ManifestEntry(AvtraceModel):
    video_path: str
    audio_path: str | None = None
    y: int = Field(ge=0, le=1)
    g: int = Field(ge=0)
    split: Split
    source_id: str

    @model_validator(mode="after")
    def _label_consistency(self) -> "ManifestEntry":
        if self.y != int(self.g >= 1):
            raise ValueError(f"{self.source_id}: y={self.y} inconsistent with generator g={self.g}")
        return self


class DatasetManifest(AvtraceModel):
    entries: list[ManifestEntry]
    generator_names: dict[int, str]
    root: str = "."
    """Directory that relative media paths resolve against."""

    @model_validator(mode="after")
    def _check_invariants(self) -> "DatasetManifest":
        unknown = sorted({e.g for e in self.entries} - set(self.generator_names))
        if unknown:
            raise ValueError(f"generator ids {unknown} missing from generator_names")
        seen: dict[str, str] = {}
        for e in self.entries:
            other = seen.setdefault(e.source_id, e.split)
            if other != e.split:
                raise ValueError(f"source_id {e.source_id!r} appears in both {other!r} and {e.split!r}")
        return self

    @property
    def num_classes(self) -> int:
        """G + 1: the real class plus every known generator."""
        return max(self.generator_names) + 1

    def split(self, name: Split) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == name]

    def class_counts(self, name: Split) -> dict[int, int]:
        counts = {g: 0 for g in range(self.num_classes)}
        for e in self.split(name):
            counts[e.g] += 1
        return counts


# ---------------------------------------------------------------------------
# Losses and training log
# ---------------------------------------------------------------------------
class LossBreakdown(AvtraceModel):
    det: float = Field(ge=0.0)
    attr: float = Field(ge=0.0)
    cont: float = Field(ge=0.0)
    fp: float = Field(ge=0.0)
    cen: float = Field(ge=0.0)
    total: float

    def composed(self, weights: LossWeights) -> float:
        """det + λa·attr + λc·cont + λf·fp + λr·cen for the given weights."""
        return (
            self.det
            + weights.attr * self.attr
            + weights.cont * self.cont
            + weights.fp * self.fp
            + weights.cen * self.cen
        )


class StepRecord(AvtraceModel):
    kind: Literal["step"] = "step"
    step: int
    epoch: int
    lr: float
    det: float
    attr: float
    cont: float
    fp: float
    cen: float
    total: float
    fp_groups: int = 0
    """Generator groups the fingerprint loss was computed over on this step."""


class EpochRecord(AvtraceModel):
    kind: Literal["epoch"] = "epoch"
    epoch: int
    lr: float
    steps: int
    mean_total: float
    fp_skipped_steps: int
    skipped_samples: int = 0
    val_balanced_accuracy: float | None = None
    val_attribution_accuracy: float | None = None


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------
class MetricsReport(AvtraceModel):
    balanced_accuracy: float | None
    auc: float | None
    f1: float
    real_accuracy: float | None
    fake_accuracy: float | None
    attribution_accuracy: float
    detect_confusion: list[list[int]]
    """Rows are true labels (real, fake), columns predictions."""
    attr_confusion: list[list[int]]
    per_generator_detection: dict[int, float]
    per_generator_auc: dict[int, float] = Field(default_factory=dict)
    """AUC of reals against each generator alone (g >= 1)."""
    threshold: float
    num_samples: int
    split: str = "test"
    generator_names: dict[int, str] = Field(default_factory=dict)
    diagnostics: list[str] = Field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    @model_validator(mode="after")
    def _check_counts(self) -> "MetricsReport":
        for name, matrix in (("detect_confusion", self.detect_confusion), ("attr_confusion", self.attr_confusion)):
            if sum(map(sum, matrix)) != self.num_samples:
                raise ValueError(f"{name} counts do not sum to {self.num_samples}")
        if None not in (self.real_accuracy, self.fake_accuracy, self.balanced_accuracy):
            expected = (self.real_accuracy + self.fake_accuracy) / 2  # type: ignore[operator]
            if not math.isclose(self.balanced_accuracy, expected, abs_tol=1e-12):  # type: ignore[arg-type]
                raise ValueError("balanced_accuracy must equal the mean of real and fake accuracy")
        return self

    def _name(self, g: int) -> str:
        return self.generator_names.get(g, "real" if g == 0 else f"gen{g}")

    def summary(self) -> str:
        """Human-readable summary of the report."""

        def pct(value: float | None) -> str:
            return "n/a" if value is None else f"{100 * value:.1f}%"

        lines = [
            f"split={self.split} n={self.num_samples} threshold={self.threshold}",
            f"  Bal.Acc {pct(self.balanced_accuracy)}  AUC {pct(self.auc)}  F1 {pct(self.f1)}",
            f"  Real {pct(self.real_accuracy)}  Fake {pct(self.fake_accuracy)}  Attr {pct(self.attribution_accuracy)}",
        ]
        for g, acc in sorted(self.per_generator_detection.items()):
            gen_auc = self.per_generator_auc.get(g)
            extra = f"  AUC {pct(gen_auc)}" if gen_auc is not None else ""
            lines.append(f"    {self._name(g):<12} detection {pct(acc)}{extra}")
        lines.extend(f"  ! {d}" for d in self.diagnostics)
        return "\n".join(lines)


class SimilarityStats(AvtraceModel):
    mean: float
    std: float
    count: int


class AblationRow(AvtraceModel):
    variant: str
    balanced_accuracy: float | None
    auc: float | None
    f1: float | None
    real_accuracy: float | None
    fake_accuracy: float | None
    attribution_accuracy: float | None


class AblationComparison(AvtraceModel):
    baseline: str
    rows: list[AblationRow]
    deltas: dict[str, dict[str, float | None]]
    """Per variant, metric minus the baseline's (None where either side is absent)."""
