"""Audio encoder: single-channel residual backbone and a projection to D."""

from __future__ import annotations

import torch
from torch import nn

from avtrace._types import MEL_SHAPE
from avtrace.config import EncoderConfig
from avtrace.encoders.backbones import BACKBONES, to_single_channel
from avtrace.registry import ComponentRegistry


class AudioEncoder(nn.Module):
    """Mel [B, 1, 128, 128] -> z_a [B, D].

    The backbone is built for RGB input and its first convolution is replaced
    by the colour-averaged single-channel copy, whatever its initialization.
    """

    def __init__(self, config: EncoderConfig, registry: ComponentRegistry = BACKBONES) -> None:
        super().__init__()
        backbone, self.feature_width = registry.build(
            config.audio_backbone, width=config.backbone_width, pretrained=config.pretrained_init
        )
        self.backbone = to_single_channel(backbone)
        self.projection = nn.Linear(self.feature_width, config.embed_dim)

    def forward(self, mel: torch.Tensor) -> torch.Tensor:
        if mel.ndim == 3:
            mel = mel.unsqueeze(0)
        if tuple(mel.shape[1:]) != MEL_SHAPE:
            raise ValueError(f"expected mel [B, {', '.join(map(str, MEL_SHAPE))}], got {tuple(mel.shape)}")
        return self.projection(self.backbone(mel))
