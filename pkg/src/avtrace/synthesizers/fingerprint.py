"""Synthetic-fingerprint dataset generator.

Every clip carries content driven by a small latent vector: low-frequency
cosine patterns that drift over time in the frames, and tones with a matching
amplitude envelope in the audio. Real clips share one latent between the two
modalities. A fake clip from generator g additionally carries

  * a spatial grating with a g-specific orientation and frequency, added to
    every frame, and
  * a tone centred on a g-specific mel band,

and its audio is driven by an independent latent, so the pair is no longer
aligned (the fake-video / real-audio situation).
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from avtrace._cache import write_array
from avtrace._errors import ConfigError
from avtrace._helpers import numpy_stream
from avtrace.audio.constants import MelFrontEnd
from avtrace.audio.manager import AudioManager
from avtrace.audio.mel import mel_band_centers
from avtrace.config import SynthConfig
from avtrace.datapipe.manifest import build_manifest, write_manifest
from avtrace.models import SPLITS, DatasetManifest, ManifestEntry

logger = logging.getLogger("avtrace.synthesizers")

MANIFEST_FILE = "manifest.jsonl"
MEDIA_DIR = "media"

_LATENT_DIM = 4
_CONTENT_TONE_AMPLITUDE = 0.2
# Mel rows kept clear of content tones (which stay below 2 kHz).
_FINGERPRINT_ROWS = (76, 124)


class FingerprintSynthesizer:
    """Renders seeded audio-visual clips with generator-specific fingerprints.

    Usage:
        synth = FingerprintSynthesizer(SynthConfig(generators=3, n_per_class=50))
        manifest = synth.generate("data/synthetic")
    """

    def __init__(self, config: SynthConfig) -> None:
        if config.generator_names is not None and len(config.generator_names) != config.generators:
            raise ConfigError(
                f"synth.generator_names has {len(config.generator_names)} names for {config.generators} generators"
            )
        self.config = config
        self._centers = mel_band_centers()

    # ------------------------------------------------------------------
    # Fingerprint geometry
    # ------------------------------------------------------------------
    def grating(self, g: int) -> tuple[float, float]:
        """(orientation in radians, frequency in cycles per pixel) of generator ``g``."""
        steps = max(self.config.generators - 1, 1)
        theta = (g - 1) * (math.pi / 2) / steps
        freq = 0.10 + 0.12 * (g - 1) / steps
        return theta, freq

    def fingerprint_band(self, g: int) -> int:
        """Mel row boosted by generator ``g``."""
        lo, hi = _FINGERPRINT_ROWS
        steps = max(self.config.generators - 1, 1)
        return lo + round((g - 1) * (hi - lo) / steps)

    def generator_names(self) -> dict[int, str]:
        names = self.config.generator_names or [f"gen{g}" for g in range(1, self.config.generators + 1)]
        return {0: "real", **{g: name for g, name in enumerate(names, start=1)}}

    # ------------------------------------------------------------------
    # Rendering
    # ------------------------------------------------------------------
    def render_frames(self, rng: np.random.Generator, latent: np.ndarray, g: int) -> np.ndarray:
        """[decoded_frames, 3, S, S] float32 in [0, 1]."""
        cfg = self.config
        size, count = cfg.frame_size, cfg.decoded_frames
        yy, xx = np.meshgrid(np.arange(size, dtype=np.float64), np.arange(size, dtype=np.float64), indexing="ij")
        fx, fy = 0.01 + 0.04 * latent[0], 0.01 + 0.04 * latent[1]
        rate = 0.5 + 1.5 * latent[2]
        tint = 0.8 + 0.4 * rng.random(3)
        t = np.arange(count, dtype=np.float64) / count
        phase = 2 * math.pi * latent[3]

        pattern = np.cos(2 * math.pi * (fx * xx + fy * yy)[None] + phase + 2 * math.pi * rate * t[:, None, None])
        frames = 0.5 + 0.2 * pattern[:, None] * tint[None, :, None, None]
        frames = frames + cfg.noise_level * rng.standard_normal((count, 3, size, size))
        if g >= 1 and cfg.fingerprint_amplitude > 0:
            theta, freq = self.grating(g)
            wave = np.cos(2 * math.pi * freq * (xx * math.cos(theta) + yy * math.sin(theta)))
            frames = frames + cfg.fingerprint_amplitude * wave[None, None]
        return np.clip(frames, 0.0, 1.0).astype(np.float32)

    def render_waveform(self, rng: np.random.Generator, latent: np.ndarray, g: int) -> np.ndarray:
        """4 s of 16 kHz mono audio in [-1, 1]."""
        cfg = self.config
        n = MelFrontEnd.NUM_SAMPLES
        t = np.arange(n, dtype=np.float64) / MelFrontEnd.SAMPLE_RATE
        duration = n / MelFrontEnd.SAMPLE_RATE
        rate = 0.5 + 1.5 * latent[2]
        envelope = 0.6 + 0.4 * np.cos(2 * math.pi * rate * t / duration + 2 * math.pi * latent[3])

        audio = np.zeros(n, dtype=np.float64)
        for k in range(3):
            freq = 200.0 + 1600.0 * latent[k]
            audio += _CONTENT_TONE_AMPLITUDE * np.sin(2 * math.pi * freq * t + rng.uniform(0, 2 * math.pi))
        audio *= envelope
        audio += cfg.noise_level * rng.standard_normal(n)
        if g >= 1 and cfg.fingerprint_amplitude > 0:
            tone = self._centers[self.fingerprint_band(g)]
            audio += cfg.fingerprint_amplitude * np.sin(2 * math.pi * tone * t)
        return np.clip(audio, -1.0, 1.0).astype(np.float32)

    # ------------------------------------------------------------------
    # Dataset
    # ------------------------------------------------------------------
    def _clip(self, out_dir: Path, split_index: int, split: str, g: int, i: int) -> ManifestEntry:
        rng = numpy_stream(self.config.seed, "synth", split_index, g, i)
        visual_latent = rng.random(_LATENT_DIM)
        # Fakes lose audio-visual alignment only when a fingerprint is planted,
        # so amplitude 0 leaves the two classes identically distributed.
        desync = g >= 1 and self.config.fingerprint_amplitude > 0
        audio_latent = rng.random(_LATENT_DIM) if desync else visual_latent
        source_id = f"{split}-{g}-{i:04d}"
        video_rel = f"{MEDIA_DIR}/{source_id}.frames.f32"
        audio_rel = f"{MEDIA_DIR}/{source_id}.wav"
        write_array(
            out_dir / video_rel,
            self.render_frames(rng, visual_latent, g),
            source=source_id,
            value_range=[0.0, 1.0],
        )
        AudioManager.write_wav(out_dir / audio_rel, self.render_waveform(rng, audio_latent, g), MelFrontEnd.SAMPLE_RATE)
        return ManifestEntry(
            video_path=video_rel, audio_path=audio_rel, y=int(g >= 1), g=g, split=split, source_id=source_id
        )

    def generate(self, out_dir: str | Path) -> DatasetManifest:
        out = Path(out_dir)
        entries = [
            self._clip(out, split_index, split, g, i)
            for split_index, split in enumerate(SPLITS)
            for g in range(self.config.generators + 1)
            for i in range(self.config.n_per_class)
        ]
        manifest = build_manifest(entries, self.generator_names(), root=out)
        write_manifest(manifest, out / MANIFEST_FILE)
        logger.info(
            "Wrote %d clips (%d classes x %d per split) to %s",
            len(entries),
            self.config.generators + 1,
            self.config.n_per_class,
            out,
        )
        return manifest


def generate_synthetic(config: SynthConfig, out_dir: str | Path) -> DatasetManifest:
    """Write a seeded synthetic dataset to ``out_dir`` and return its manifest.

    ``out_dir/manifest.jsonl`` plus ``generators.json`` describe the clips;
    media lives under ``out_dir/media/``. The same config always produces
    byte-identical output.
    """
    if config.n_per_class < 2:
        raise ConfigError("synth.n_per_class must be at least 2")
    return FingerprintSynthesizer(config).generate(out_dir)
