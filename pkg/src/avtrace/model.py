"""The full detector: encoders, cross-modal attention, fusion and heads."""

from __future__ import annotations

import logging

import torch
from torch import nn

from avtrace._types import Batch, EmbeddingBundle, HeadOutputs, ModelOutput
from avtrace.config import RunConfig
from avtrace.encoders import AudioEncoder, VisualEncoder, count_parameters
from avtrace.fusion import AttributionHead, CrossModalAttention, DetectionHead, ProjectionHead, fuse

logger = logging.getLogger("avtrace.model")


class AttributionDetector(nn.Module):
    """Dual-stream audio-visual detector with a generator-attribution head.

    With ``bypass_cross_attention`` the encoder embeddings are fused directly
    (z̃ = z), which is the ``cma_module`` ablation.
    """

    def __init__(self, config: RunConfig, num_classes: int) -> None:
        super().__init__()
        if num_classes < 2:
            raise ValueError(f"num_classes must be at least 2, got {num_classes}")
        d = config.encoder.embed_dim
        self.num_classes = num_classes
        self.bypass_cross_attention = config.train.bypass_cross_attention
        self.visual = VisualEncoder(config.encoder, config.data.frames_per_clip)
        self.audio = AudioEncoder(config.encoder)
        self.cross_attention = CrossModalAttention(d, config.encoder.attention_heads)
        self.detect_head = DetectionHead(2 * d, config.hidden_dim, config.heads.dropout)
        self.attr_head = AttributionHead(2 * d, config.hidden_dim, num_classes, config.heads.dropout)
        self.visual_projection = ProjectionHead(d, config.projection_dim)
        self.audio_projection = ProjectionHead(d, config.projection_dim)

    def parameter_counts(self) -> dict[str, int]:
        return {name: count_parameters(child) for name, child in self.named_children()}

    def log_summary(self) -> None:
        counts = self.parameter_counts()
        for name, n in counts.items():
            logger.info("%-18s %12d parameters", name, n)
        logger.info("%-18s %12d parameters", "total", sum(counts.values()))

    def embed(self, frames: torch.Tensor, mel: torch.Tensor) -> EmbeddingBundle:
        z_v = self.visual(frames)
        z_a = self.audio(mel)
        if self.bypass_cross_attention:
            z_v_tilde, z_a_tilde = z_v, z_a
        else:
            z_v_tilde, z_a_tilde = self.cross_attention(z_v, z_a)
        return EmbeddingBundle(
            z_v=z_v,
            z_a=z_a,
            z_v_tilde=z_v_tilde,
            z_a_tilde=z_a_tilde,
            z_f=fuse(z_v_tilde, z_a_tilde),
            p_v=self.visual_projection(z_v_tilde),
            p_a=self.audio_projection(z_a_tilde),
        )

    def heads(self, z_f: torch.Tensor) -> HeadOutputs:
        detect_logit, detect_prob = self.detect_head(z_f)
        attr_logits, attr_probs = self.attr_head(z_f)
        return HeadOutputs(
            detect_logit=detect_logit, detect_prob=detect_prob, attr_logits=attr_logits, attr_probs=attr_probs
        )

    def forward(self, frames: torch.Tensor, mel: torch.Tensor) -> ModelOutput:
        embeddings = self.embed(frames, mel)
        return ModelOutput(embeddings=embeddings, heads=self.heads(embeddings.z_f))

    def run_batch(self, batch: Batch) -> ModelOutput:
        return self(batch.frames, batch.mel)
