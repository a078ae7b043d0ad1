"""Protocol definitions for avtrace extension points.

Extension points use typing.Protocol (structural subtyping): any object with
the right methods plugs in, no inheritance needed.
"""

from __future__ import annotations

from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class MediaReader(Protocol):
    """Decodes the media a manifest entry points at.

    Implement this to plug in a real video/audio decoder. Frames are expected
    to be face-cropped already.
    """

    def read_frames(self, path: Path) -> np.ndarray:
        """Return float32 frames shaped [N, 3, H, W] with values in [0, 1]."""
        ...

    def read_waveform(self, path: Path) -> tuple[np.ndarray, int]:
        """Return a mono float32 waveform and its sample rate."""
        ...
