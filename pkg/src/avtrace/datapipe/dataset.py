"""torch Dataset over one manifest split."""

from __future__ import annotations

import logging

import torch
from torch.utils.data import Dataset

from avtrace._cache import ArrayCache
from avtrace._errors import MediaError
from avtrace._helpers import numpy_stream
from avtrace._protocols import MediaReader
from avtrace._types import Batch, Sample
from avtrace.config import DataConfig
from avtrace.datapipe.loading import load_sample
from avtrace.models import DatasetManifest, Split

logger = logging.getLogger("avtrace.datapipe")


class ClipDataset(Dataset[Sample | None]):
    """Loads the clips of one split.

    Each item is a pure function of (seed, epoch, index), so any number of
    loader workers yields the same sample stream.

    In training mode (``strict=False``) unloadable media is logged and the
    item comes back as None, which :func:`collate_samples` drops; in
    evaluation mode (``strict=True``) the MediaError propagates.
    """

    def __init__(
        self,
        manifest: DatasetManifest,
        split: Split,
        config: DataConfig,
        *,
        augment: bool = False,
        strict: bool = True,
        seed: int = 0,
        reader: MediaReader | None = None,
        cache: ArrayCache | None = None,
        silent_audio: bool = False,
    ) -> None:
        self.manifest = manifest
        self.entries = manifest.split(split)
        self.split = split
        self.config = config
        self.augment = augment
        self.strict = strict
        self.seed = seed
        self.reader = reader
        self.cache = cache
        self.silent_audio = silent_audio
        self.epoch = 0

    def set_epoch(self, epoch: int) -> None:
        self.epoch = epoch

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> Sample | None:
        entry = self.entries[index]
        rng = numpy_stream(self.seed, "augment", self.epoch, index) if self.augment else None
        try:
            return load_sample(
                entry,
                self.manifest,
                self.config,
                augment=self.augment,
                rng=rng,
                reader=self.reader,
                cache=self.cache,
                silent_audio=self.silent_audio,
            )
        except MediaError as exc:
            if self.strict:
                raise
            logger.warning("Skipping %s: %s", entry.source_id, exc)
            return None


def collate_samples(items: list[Sample | None]) -> Batch:
    samples = [s for s in items if s is not None]
    skipped = len(items) - len(samples)
    if not samples:
        return Batch(
            frames=torch.empty(0),
            mel=torch.empty(0),
            y=torch.empty(0, dtype=torch.long),
            g=torch.empty(0, dtype=torch.long),
            source_ids=[],
            skipped=skipped,
        )
    return Batch(
        frames=torch.stack([s.frames for s in samples]),
        mel=torch.stack([s.mel for s in samples]),
        y=torch.tensor([s.y for s in samples], dtype=torch.long),
        g=torch.tensor([s.g for s in samples], dtype=torch.long),
        source_ids=[s.source_id for s in samples],
        skipped=skipped,
    )
