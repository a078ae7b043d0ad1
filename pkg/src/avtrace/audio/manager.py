"""AudioManager: waveform I/O shared by the synthetic generator and the loader."""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np
import torch
import torchaudio.functional as AF

from avtrace.audio.constants import WAV_SAMPLE_WIDTH


class AudioManager:
    """Centralized waveform handling: WAV read/write, resampling, length fitting."""

    @staticmethod
    def has_wav_header(data: bytes) -> bool:
        """True if data starts with a RIFF/WAV header."""
        return len(data) >= 4 and data[:4] == b"RIFF"

    @staticmethod
    def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
        """Read a 16-bit PCM WAV into a mono float32 waveform in [-1, 1]."""
        p = Path(path)
        if not AudioManager.has_wav_header(p.read_bytes()[:4]):
            raise ValueError(f"{p}: not a RIFF/WAV file")
        with wave.open(str(p), "rb") as wf:
            if wf.getsampwidth() != WAV_SAMPLE_WIDTH:
                raise ValueError(f"{p}: expected 16-bit PCM, got {8 * wf.getsampwidth()}-bit")
            channels = wf.getnchannels()
            rate = wf.getframerate()
            pcm = np.frombuffer(wf.readframes(wf.getnframes()), dtype="<i2")
        samples = pcm.astype(np.float32) / 32768.0
        if channels > 1:
            samples = samples.reshape(-1, channels).mean(axis=1)
        return samples, rate

    @staticmethod
    def write_wav(path: str | Path, waveform: np.ndarray, sample_rate: int) -> Path:
        """Write a mono float waveform (clipped to [-1, 1]) as 16-bit PCM WAV."""
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        pcm = np.round(np.clip(waveform, -1.0, 1.0) * 32767.0).astype("<i2")
        with wave.open(str(p), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(WAV_SAMPLE_WIDTH)
            wf.setframerate(sample_rate)
            wf.writeframes(pcm.tobytes())
        return p

    @staticmethod
    def resample(waveform: np.ndarray, from_rate: int, to_rate: int) -> np.ndarray:
        if from_rate == to_rate:
            return waveform
        out = AF.resample(torch.from_numpy(np.ascontiguousarray(waveform, dtype=np.float32)), from_rate, to_rate)
        return out.numpy()

    @staticmethod
    def fit_length(waveform: np.ndarray, num_samples: int) -> np.ndarray:
        """Zero-pad at the end or centre-crop to exactly ``num_samples``."""
        n = waveform.shape[-1]
        if n == num_samples:
            return waveform
        if n < num_samples:
            return np.pad(waveform, (0, num_samples - n))
        start = (n - num_samples) // 2
        return waveform[start : start + num_samples]
