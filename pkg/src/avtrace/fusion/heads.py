"""Detection, attribution and projection heads."""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

PROJECTION_EPS = 1e-12


def _mlp(in_dim: int, hidden_dim: int, out_dim: int, dropout: float) -> nn.Sequential:
    return nn.Sequential(nn.Linear(in_dim, hidden_dim), nn.ReLU(), nn.Dropout(dropout), nn.Linear(hidden_dim, out_dim))


class DetectionHead(nn.Module):
    """z_f [B, 2D] -> (logit [B], sigmoid probability [B])."""

    def __init__(self, in_dim: int, hidden_dim: int, dropout: float = 0.3) -> None:
        super().__init__()
        self.mlp = _mlp(in_dim, hidden_dim, 1, dropout)

    def forward(self, z_f: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        logit = self.mlp(z_f).squeeze(-1)
        return logit, torch.sigmoid(logit)


class AttributionHead(nn.Module):
    """z_f [B, 2D] -> (logits [B, G+1], softmax [B, G+1]); class 0 is real."""

    def __init__(self, in_dim: int, hidden_dim: int, num_classes: int, dropout: float = 0.3) -> None:
        super().__init__()
        self.num_classes = num_classes
        self.mlp = _mlp(in_dim, hidden_dim, num_classes, dropout)

    def forward(self, z_f: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        logits = self.mlp(z_f)
        return logits, torch.softmax(logits, dim=-1)


class ProjectionHead(nn.Module):
    """Two-layer projection of one modality, ℓ2-normalized per row.

    A zero row before normalization comes out as zero (the norm is clamped at
    ``PROJECTION_EPS``).
    """

    def __init__(self, in_dim: int, out_dim: int) -> None:
        super().__init__()
        self.mlp = nn.Sequential(nn.Linear(in_dim, out_dim), nn.ReLU(), nn.Linear(out_dim, out_dim))

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return F.normalize(self.mlp(z), p=2.0, dim=-1, eps=PROJECTION_EPS)
