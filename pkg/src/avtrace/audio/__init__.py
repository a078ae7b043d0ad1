"""Audio utilities: waveform I/O and the log-mel front-end."""

from avtrace.audio.constants import MelFrontEnd
from avtrace.audio.manager import AudioManager
from avtrace.audio.mel import compute_mel, mel_band_centers, silent_mel

__all__ = ["AudioManager", "MelFrontEnd", "compute_mel", "mel_band_centers", "silent_mel"]
