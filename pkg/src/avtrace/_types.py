"""Core tensor-carrying types for avtrace.

``Sample`` is a validated Pydantic model (it crosses the data boundary);
forward-pass containers are frozen dataclasses because they live inside the
autograd graph and are built on every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from pydantic import BaseModel, ConfigDict, model_validator

MEL_SHAPE = (1, 128, 128)


class Sample(BaseModel):
    """One clip: frame sequence, mel spectrogram and labels."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frames: torch.Tensor
    """[T, 3, S, S], normalized."""
    mel: torch.Tensor
    """[1, 128, 128] in [-1, 1]."""
    y: int
    g: int
    source_id: str

    @model_validator(mode="after")
    def _check(self) -> "Sample":
        if self.y != int(self.g >= 1):
            raise ValueError(f"{self.source_id}: y={self.y} inconsistent with generator g={self.g}")
        if tuple(self.mel.shape) != MEL_SHAPE:
            raise ValueError(f"{self.source_id}: mel shape {tuple(self.mel.shape)} != {MEL_SHAPE}")
        if self.mel.numel() and (self.mel.min() < -1.0 or self.mel.max() > 1.0):
            raise ValueError(f"{self.source_id}: mel values outside [-1, 1]")
        if self.frames.ndim != 4 or self.frames.shape[1] != 3 or self.frames.shape[2] != self.frames.shape[3]:
            raise ValueError(f"{self.source_id}: frames shape {tuple(self.frames.shape)} is not [T, 3, S, S]")
        return self


@dataclass(frozen=True)
class Batch:
    """Collated samples: frames [B, T, 3, S, S], mel [B, 1, 128, 128]."""

    frames: torch.Tensor
    mel: torch.Tensor
    y: torch.Tensor
    g: torch.Tensor
    source_ids: list[str]
    skipped: int = 0
    """Samples dropped from this batch because their media failed to load."""

    def __len__(self) -> int:
        return len(self.source_ids)


@dataclass(frozen=True)
class EmbeddingBundle:
    """Every intermediate representation of one forward pass."""

    z_v: torch.Tensor
    z_a: torch.Tensor
    z_v_tilde: torch.Tensor
    z_a_tilde: torch.Tensor
    z_f: torch.Tensor
    p_v: torch.Tensor
    p_a: torch.Tensor

    def get(self, which: str) -> torch.Tensor:
        return {
            "z_v": self.z_v,
            "z_a": self.z_a,
            "z_v_tilde": self.z_v_tilde,
            "z_a_tilde": self.z_a_tilde,
            "z_f": self.z_f,
            "p_v": self.p_v,
            "p_a": self.p_a,
        }[which]


@dataclass(frozen=True)
class HeadOutputs:
    detect_logit: torch.Tensor
    detect_prob: torch.Tensor
    attr_logits: torch.Tensor
    attr_probs: torch.Tensor


@dataclass(frozen=True)
class ModelOutput:
    embeddings: EmbeddingBundle
    heads: HeadOutputs
