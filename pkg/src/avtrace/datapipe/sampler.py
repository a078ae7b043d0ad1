"""Class-balanced sampling over generator labels."""

from __future__ import annotations

import torch
from torch.utils.data import WeightedRandomSampler

from avtrace._errors import ManifestError
from avtrace.models import DatasetManifest, Split


def make_weighted_sampler(manifest: DatasetManifest, split: Split = "train") -> torch.Tensor:
    """Per-entry weights proportional to 1 / count(class of entry).

    Under sampling with replacement every one of the G+1 classes is then
    drawn with equal expected frequency.

    Raises:
        ManifestError: the split is empty or a known class has no entries.
    """
    entries = manifest.split(split)
    if not entries:
        raise ManifestError(f"split {split!r} is empty")
    counts = manifest.class_counts(split)
    missing = sorted(g for g, n in counts.items() if n == 0)
    if missing:
        raise ManifestError(f"split {split!r} has no entries for generator(s) {missing}")
    return torch.tensor([1.0 / counts[e.g] for e in entries], dtype=torch.float64)


def build_sampler(weights: torch.Tensor, num_samples: int, generator: torch.Generator) -> WeightedRandomSampler:
    return WeightedRandomSampler(weights, num_samples=num_samples, replacement=True, generator=generator)
