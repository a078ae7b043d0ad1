"""Log-mel front-end.

Power spectrogram (1024-pt FFT, hop 512, zero-padded at the centre) projected onto 128
mel bands, converted to dB relative to the clip maximum, floored at -80 dB,
mapped linearly onto [-1, 1] and resampled along time to 128 frames.
"""

from __future__ import annotations

import functools
import logging
import math

import numpy as np
import torch
import torch.nn.functional as F
import torchaudio.functional as AF
from torchaudio.transforms import MelSpectrogram

from avtrace._types import MEL_SHAPE
from avtrace.audio.constants import MelFrontEnd
from avtrace.audio.manager import AudioManager

logger = logging.getLogger("avtrace.audio")


@functools.lru_cache(maxsize=1)
def _mel_transform() -> MelSpectrogram:
    return MelSpectrogram(
        sample_rate=MelFrontEnd.SAMPLE_RATE,
        n_fft=MelFrontEnd.N_FFT,
        hop_length=MelFrontEnd.HOP_LENGTH,
        n_mels=MelFrontEnd.N_MELS,
        center=True,
        pad_mode=MelFrontEnd.PAD_MODE,
        power=2.0,
    )


def silent_mel() -> torch.Tensor:
    """The spectrogram of silence: constant -1 (the bottom of the dB range)."""
    return torch.full(MEL_SHAPE, -1.0)


def mel_band_centers() -> np.ndarray:
    """Centre frequency (Hz) of each of the 128 mel bands on the HTK scale."""
    high = 2595.0 * math.log10(1.0 + (MelFrontEnd.SAMPLE_RATE / 2) / 700.0)
    mels = np.linspace(0.0, high, MelFrontEnd.N_MELS + 2)[1:-1]
    return 700.0 * (10.0 ** (mels / 2595.0) - 1.0)


def compute_mel(waveform: np.ndarray | torch.Tensor, sample_rate: int = MelFrontEnd.SAMPLE_RATE) -> torch.Tensor:
    """Map a mono waveform to a [1, 128, 128] log-mel image in [-1, 1].

    Input at another rate is resampled to 16 kHz first; shorter clips are
    zero-padded and longer ones centre-cropped to 4 s.

    Raises:
        ValueError: the waveform contains NaN or infinite samples.
    """
    samples = waveform.detach().cpu().numpy() if isinstance(waveform, torch.Tensor) else np.asarray(waveform)
    samples = samples.astype(np.float32, copy=False).reshape(-1)
    if samples.size == 0:
        logger.warning("Empty waveform, using the silent spectrogram")
        return silent_mel()
    if not np.isfinite(samples).all():
        bad = int((~np.isfinite(samples)).sum())
        raise ValueError(f"waveform has {bad} non-finite sample(s)")

    samples = AudioManager.resample(samples, sample_rate, MelFrontEnd.SAMPLE_RATE)
    samples = AudioManager.fit_length(samples, MelFrontEnd.NUM_SAMPLES)

    with torch.no_grad():
        power = _mel_transform()(torch.from_numpy(np.ascontiguousarray(samples)).unsqueeze(0))
        peak = float(power.max())
        if peak <= MelFrontEnd.AMIN:
            return silent_mel()
        db = AF.amplitude_to_DB(
            power,
            multiplier=10.0,
            amin=MelFrontEnd.AMIN,
            db_multiplier=math.log10(peak),
            top_db=MelFrontEnd.TOP_DB,
        )
        scaled = db / (MelFrontEnd.TOP_DB / 2) + 1.0
        resized = F.interpolate(scaled, size=MelFrontEnd.TIME_FRAMES, mode="linear", align_corners=True)
    return resized.clamp_(-1.0, 1.0).reshape(MEL_SHAPE).contiguous()
