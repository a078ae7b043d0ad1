"""Turning a manifest entry into a validated :class:`Sample`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
import torchvision.transforms.functional as TF

from avtrace._cache import ArrayCache
from avtrace._errors import MediaError
from avtrace._protocols import MediaReader
from avtrace._types import Sample
from avtrace.audio.constants import MelFrontEnd
from avtrace.audio.mel import compute_mel, silent_mel
from avtrace.config import DataConfig
from avtrace.datapipe.manifest import resolve
from avtrace.datapipe.reader import ArrayMediaReader
from avtrace.models import DatasetManifest, ManifestEntry


@dataclass(frozen=True)
class ClipAugmentation:
    """Augmentation parameters drawn once per clip and applied to every frame."""

    flip: bool
    jitter: tuple[float, float, float] | None
    """(brightness, contrast, saturation) factors, or None when jitter is skipped."""
    grayscale: bool

    @classmethod
    def draw(cls, rng: np.random.Generator, config: DataConfig) -> "ClipAugmentation":
        flip = bool(rng.random() < config.flip_prob)
        jitter = None
        if rng.random() < config.jitter_prob:
            lo, hi = 1.0 - config.jitter_strength, 1.0 + config.jitter_strength
            jitter = tuple(float(f) for f in rng.uniform(lo, hi, size=3))
        grayscale = bool(rng.random() < config.grayscale_prob)
        return cls(flip=flip, jitter=jitter, grayscale=grayscale)  # type: ignore[arg-type]

    def apply(self, frames: torch.Tensor) -> torch.Tensor:
        """Apply to [T, 3, S, S] frames with values in [0, 1]."""
        if self.flip:
            frames = torch.flip(frames, dims=[-1])
        if self.jitter is not None:
            brightness, contrast, saturation = self.jitter
            frames = TF.adjust_brightness(frames, brightness)
            frames = TF.adjust_contrast(frames, contrast)
            frames = TF.adjust_saturation(frames, saturation)
        if self.grayscale:
            frames = TF.rgb_to_grayscale(frames, num_output_channels=3)
        return frames


def sample_frame_indices(num_decoded: int, count: int) -> np.ndarray:
    """Indices of ``count`` frames spread uniformly over ``num_decoded`` frames."""
    if num_decoded < 1:
        raise ValueError("clip has no frames")
    return np.round(np.linspace(0, num_decoded - 1, count)).astype(np.int64)


def _load_frames(
    reader: MediaReader, manifest: DatasetManifest, entry: ManifestEntry, config: DataConfig
) -> torch.Tensor:
    path = resolve(manifest, entry.video_path)
    if not path.exists():
        raise MediaError(entry.source_id, f"video not found: {path}")
    try:
        decoded = reader.read_frames(path)
    except (OSError, ValueError, KeyError) as exc:
        raise MediaError(entry.source_id, f"cannot decode {path}: {exc}") from exc
    if not np.isfinite(decoded).all():
        raise MediaError(entry.source_id, f"non-finite pixel values in {path}")
    idx = sample_frame_indices(decoded.shape[0], config.frames_per_clip)
    frames = torch.from_numpy(np.ascontiguousarray(decoded[idx], dtype=np.float32))
    if frames.shape[-1] != config.frame_size or frames.shape[-2] != config.frame_size:
        size = (config.frame_size, config.frame_size)
        frames = F.interpolate(frames, size=size, mode="bilinear", align_corners=False)
    return frames.clamp(0.0, 1.0)


def _load_mel(
    reader: MediaReader,
    manifest: DatasetManifest,
    entry: ManifestEntry,
    cache: ArrayCache | None,
) -> torch.Tensor:
    if entry.audio_path is None:
        return silent_mel()
    path = resolve(manifest, entry.audio_path)
    if not path.exists():
        raise MediaError(entry.source_id, f"audio not found: {path}")
    key = None
    if cache is not None:
        stat = path.stat()
        key = cache.cache_key(
            str(path.resolve()), size=stat.st_size, mtime_ns=stat.st_mtime_ns, **MelFrontEnd.params()
        )
        cached = cache.get(key)
        if cached is not None:
            return torch.from_numpy(cached)
    try:
        waveform, rate = reader.read_waveform(path)
        mel = compute_mel(waveform, rate)
    except (OSError, ValueError, EOFError) as exc:
        raise MediaError(entry.source_id, f"cannot decode {path}: {exc}") from exc
    if cache is not None and key is not None:
        cache.put(key, mel.numpy(), source=str(path))
    return mel


def load_sample(
    entry: ManifestEntry,
    manifest: DatasetManifest,
    config: DataConfig,
    *,
    augment: bool = False,
    rng: np.random.Generator | None = None,
    reader: MediaReader | None = None,
    cache: ArrayCache | None = None,
    silent_audio: bool = False,
) -> Sample:
    """Decode, subsample, augment and normalize one clip.

    Augmentation draws from ``rng`` (required when ``augment`` is set) and is
    identical across the T frames of the clip. Normalization is applied last.
    ``silent_audio`` replaces the audio track with silence.

    Raises:
        MediaError: media is missing, undecodable or non-finite.
    """
    reader = reader or ArrayMediaReader()
    frames = _load_frames(reader, manifest, entry, config)
    if augment:
        if rng is None:
            raise ValueError("augment=True requires an rng")
        frames = ClipAugmentation.draw(rng, config).apply(frames)
    frames = TF.normalize(frames, mean=list(config.mean), std=list(config.std))
    mel = silent_mel() if silent_audio else _load_mel(reader, manifest, entry, cache)
    return Sample(frames=frames, mel=mel, y=entry.y, g=entry.g, source_id=entry.source_id)
