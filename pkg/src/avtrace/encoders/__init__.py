"""Visual and audio encoders and their residual backbones."""

from avtrace.encoders.audio import AudioEncoder
from avtrace.encoders.backbones import (
    BACKBONES,
    SmallResNet,
    adapt_conv,
    adapt_first_layer,
    count_parameters,
    to_single_channel,
)
from avtrace.encoders.visual import VisualEncoder, pool_visual

__all__ = [
    "BACKBONES",
    "AudioEncoder",
    "SmallResNet",
    "VisualEncoder",
    "adapt_conv",
    "adapt_first_layer",
    "count_parameters",
    "pool_visual",
    "to_single_channel",
]
