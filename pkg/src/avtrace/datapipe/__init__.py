"""Manifests, media loading, augmentation and sampling."""

from avtrace.datapipe.dataset import ClipDataset, collate_samples
from avtrace.datapipe.loading import ClipAugmentation, load_sample, sample_frame_indices
from avtrace.datapipe.manifest import build_manifest, read_manifest, resolve, write_manifest
from avtrace.datapipe.reader import ArrayMediaReader
from avtrace.datapipe.sampler import build_sampler, make_weighted_sampler

__all__ = [
    "ArrayMediaReader",
    "ClipAugmentation",
    "ClipDataset",
    "build_manifest",
    "build_sampler",
    "collate_samples",
    "load_sample",
    "make_weighted_sampler",
    "read_manifest",
    "resolve",
    "sample_frame_indices",
    "write_manifest",
]
