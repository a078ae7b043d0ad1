"""Bidirectional cross-modal attention over per-clip embeddings."""

from __future__ import annotations

import torch
from torch import nn


def fuse(z_v_tilde: torch.Tensor, z_a_tilde: torch.Tensor) -> torch.Tensor:
    """Concatenate [B, D] visual and audio embeddings into z_f [B, 2D], visual half first."""
    if z_v_tilde.shape[0] != z_a_tilde.shape[0]:
        raise ValueError(f"batch sizes differ: {z_v_tilde.shape[0]} vs {z_a_tilde.shape[0]}")
    return torch.cat([z_v_tilde, z_a_tilde], dim=-1)


class CrossModalAttention(nn.Module):
    """z̃_v = LayerNorm(z_v + MHA(z_v, z_a, z_a)) and the symmetric audio update.

    Each embedding is a length-1 sequence, so every sample attends only to
    the other modality of its own clip. The two directions have separate
    parameters.
    """

    def __init__(self, embed_dim: int, num_heads: int) -> None:
        super().__init__()
        self.embed_dim = embed_dim
        self.visual_from_audio = nn.MultiheadAttention(embed_dim, num_heads, batch_first=True)
        self.audio_from_visual = nn.MultiheadAttention(embed_dim, num_heads, batch_first=True)
        self.visual_norm = nn.LayerNorm(embed_dim, eps=1e-5)
        self.audio_norm = nn.LayerNorm(embed_dim, eps=1e-5)

    def forward(self, z_v: torch.Tensor, z_a: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        if z_v.shape != z_a.shape or z_v.ndim != 2 or z_v.shape[1] != self.embed_dim:
            raise ValueError(
                f"expected matching [B, {self.embed_dim}] embeddings, got {tuple(z_v.shape)} and {tuple(z_a.shape)}"
            )
        v, a = z_v.unsqueeze(1), z_a.unsqueeze(1)
        v_update, _ = self.visual_from_audio(v, a, a, need_weights=False)
        a_update, _ = self.audio_from_visual(a, v, v, need_weights=False)
        return self.visual_norm(z_v + v_update.squeeze(1)), self.audio_norm(z_a + a_update.squeeze(1))
