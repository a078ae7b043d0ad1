"""Default media reader: cached float32 frame arrays and WAV audio."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from avtrace._cache import read_array
from avtrace.audio.manager import AudioManager


class ArrayMediaReader:
    """Reads frames written by :func:`avtrace._cache.write_array` and 16-bit WAV audio.

    Satisfies the MediaReader protocol.
    """

    def read_frames(self, path: Path) -> np.ndarray:
        frames = read_array(path)
        if frames.ndim != 4 or frames.shape[1] != 3:
            raise ValueError(f"{path}: frames must be [N, 3, H, W], got {frames.shape}")
        return frames

    def read_waveform(self, path: Path) -> tuple[np.ndarray, int]:
        return AudioManager.read_wav(path)
