"""avtrace: attribution-guided audio-visual deepfake detection."""

from avtrace._assertions import (
    LossCompositionError,
    MetricsAssertionError,
    assert_loss_composition,
    assert_metrics,
)
from avtrace._errors import (
    AvtraceError,
    CheckpointError,
    ConfigError,
    GradientError,
    ManifestError,
    MediaError,
    NonFiniteLossError,
    TrainingAborted,
)
from avtrace._types import Batch, EmbeddingBundle, HeadOutputs, ModelOutput, Sample
from avtrace.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from avtrace.config import RunConfig, apply_ablation, build_config, dump_config, load_config
from avtrace.datapipe import load_sample, make_weighted_sampler, read_manifest
from avtrace.evaluators import compare_ablations, cross_modal_similarity, evaluate, export_embeddings
from avtrace.model import AttributionDetector
from avtrace.models import DatasetManifest, LossBreakdown, ManifestEntry, MetricsReport
from avtrace.synthesizers import generate_synthetic
from avtrace.training import ablate, train

__all__ = [
    "AttributionDetector",
    "AvtraceError",
    "Batch",
    "Checkpoint",
    "CheckpointError",
    "ConfigError",
    "DatasetManifest",
    "EmbeddingBundle",
    "GradientError",
    "HeadOutputs",
    "LossBreakdown",
    "LossCompositionError",
    "ManifestEntry",
    "ManifestError",
    "MediaError",
    "MetricsAssertionError",
    "MetricsReport",
    "ModelOutput",
    "NonFiniteLossError",
    "RunConfig",
    "Sample",
    "TrainingAborted",
    "ablate",
    "apply_ablation",
    "assert_loss_composition",
    "assert_metrics",
    "build_config",
    "compare_ablations",
    "cross_modal_similarity",
    "dump_config",
    "evaluate",
    "export_embeddings",
    "generate_synthetic",
    "load_checkpoint",
    "load_config",
    "load_sample",
    "make_weighted_sampler",
    "read_manifest",
    "save_checkpoint",
    "train",
]
