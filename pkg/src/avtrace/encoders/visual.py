"""Visual encoder: per-frame backbone, projection, temporal self-attention, mean pooling."""

from __future__ import annotations

import torch
from torch import nn

from avtrace.config import EncoderConfig
from avtrace.encoders.backbones import BACKBONES
from avtrace.registry import ComponentRegistry


def pool_visual(attended: torch.Tensor) -> torch.Tensor:
    """Arithmetic mean over the frame axis ([..., T, D] -> [..., D])."""
    return attended.mean(dim=-2)


class VisualEncoder(nn.Module):
    """Frames [B, T, 3, S, S] -> z_v [B, D].

    Frames go through the backbone independently, so without the optional
    positional embedding the pooled output does not depend on frame order.
    """

    def __init__(
        self, config: EncoderConfig, frames_per_clip: int, registry: ComponentRegistry = BACKBONES
    ) -> None:
        super().__init__()
        self.frames_per_clip = frames_per_clip
        self.embed_dim = config.embed_dim
        self.backbone, self.feature_width = registry.build(
            config.visual_backbone, width=config.backbone_width, pretrained=config.pretrained_init
        )
        self.projection = nn.Linear(self.feature_width, config.embed_dim)
        self.projection_norm = nn.LayerNorm(config.embed_dim, eps=1e-5)
        self.attention = nn.MultiheadAttention(config.embed_dim, config.attention_heads, batch_first=True)
        self.attention_norm = nn.LayerNorm(config.embed_dim, eps=1e-5)
        self.positional: nn.Parameter | None = None
        if config.positional_encoding:
            self.positional = nn.Parameter(torch.zeros(1, frames_per_clip, config.embed_dim))

    def _check(self, frames: torch.Tensor) -> torch.Tensor:
        if frames.ndim == 4:
            frames = frames.unsqueeze(0)
        if frames.ndim != 5 or frames.shape[2] != 3 or frames.shape[1] != self.frames_per_clip:
            raise ValueError(
                f"expected frames [B, {self.frames_per_clip}, 3, S, S], got {tuple(frames.shape)}"
            )
        return frames

    def encode_frames(self, frames: torch.Tensor) -> torch.Tensor:
        """[B, T, 3, S, S] -> H [B, T, D]: backbone, linear, layer norm, ReLU per frame."""
        frames = self._check(frames)
        b, t = frames.shape[:2]
        features = self.backbone(frames.flatten(0, 1))
        h = torch.relu(self.projection_norm(self.projection(features)))
        return h.view(b, t, self.embed_dim)

    def temporal_attend(self, h: torch.Tensor) -> torch.Tensor:
        """LayerNorm(H + MHA(H, H, H)), normalized per position."""
        if self.positional is not None:
            h = h + self.positional[:, : h.shape[1]]
        attended, _ = self.attention(h, h, h, need_weights=False)
        return self.attention_norm(h + attended)

    def forward(self, frames: torch.Tensor) -> torch.Tensor:
        return pool_visual(self.temporal_attend(self.encode_frames(frames)))
