"""Audio front-end constants.

The mel front-end is fixed: 4 s of 16 kHz audio, 1024-point FFT, hop 512,
128 mel bands, rendered as a 128x128 image.
"""

from __future__ import annotations


class MelFrontEnd:
    """Parameters of the log-mel front-end."""

    SAMPLE_RATE = 16000
    CLIP_SECONDS = 4.0
    NUM_SAMPLES = 64000
    N_FFT = 1024
    HOP_LENGTH = 512
    N_MELS = 128
    PAD_MODE = "constant"
    TIME_FRAMES = 128
    TOP_DB = 80.0
    AMIN = 1e-10
    """Power floor; a clip whose peak power is at or below it is treated as silence."""

    @classmethod
    def raw_frames(cls, num_samples: int = NUM_SAMPLES) -> int:
        """STFT frame count with centre padding: 1 + floor(n / hop)."""
        return 1 + num_samples // cls.HOP_LENGTH

    @classmethod
    def params(cls) -> dict[str, float | int | str]:
        """Front-end parameters, used to key cached spectrograms."""
        return {
            "sample_rate": cls.SAMPLE_RATE,
            "num_samples": cls.NUM_SAMPLES,
            "n_fft": cls.N_FFT,
            "hop_length": cls.HOP_LENGTH,
            "n_mels": cls.N_MELS,
            "pad_mode": cls.PAD_MODE,
            "time_frames": cls.TIME_FRAMES,
            "top_db": cls.TOP_DB,
        }


WAV_SAMPLE_WIDTH = 2  # bytes per sample (16-bit PCM)
