"""Cross-modal fusion and prediction heads."""

from avtrace.fusion.attention import CrossModalAttention, fuse
from avtrace.fusion.heads import PROJECTION_EPS, AttributionHead, DetectionHead, ProjectionHead

__all__ = ["PROJECTION_EPS", "AttributionHead", "CrossModalAttention", "DetectionHead", "ProjectionHead", "fuse"]
