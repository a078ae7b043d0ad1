"""Training objectives and the centroid table."""

from avtrace.losses.centroids import CentroidTable, update_centroids
from avtrace.losses.objectives import (
    PROB_EPS,
    attribution_ce,
    centroid_loss,
    cmffc_loss,
    eligible_groups,
    focal_loss,
    info_nce,
)
from avtrace.losses.total import COMPONENTS, LossComputer, LossResult, total_loss

__all__ = [
    "COMPONENTS",
    "PROB_EPS",
    "CentroidTable",
    "LossComputer",
    "LossResult",
    "attribution_ce",
    "centroid_loss",
    "cmffc_loss",
    "eligible_groups",
    "focal_loss",
    "info_nce",
    "total_loss",
    "update_centroids",
]
