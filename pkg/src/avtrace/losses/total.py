"""Weighted combination of the five objectives."""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass

import torch

from avtrace._errors import NonFiniteLossError
from avtrace._types import Batch, ModelOutput
from avtrace.config import LossWeights
from avtrace.losses.centroids import CentroidTable
from avtrace.losses.objectives import (
    attribution_ce,
    centroid_loss,
    cmffc_loss,
    eligible_groups,
    focal_loss,
    info_nce,
)
from avtrace.models import LossBreakdown

logger = logging.getLogger("avtrace.losses")

COMPONENTS = ("det", "attr", "cont", "fp", "cen")


def total_loss(components: Mapping[str, torch.Tensor], weights: LossWeights) -> tuple[torch.Tensor, LossBreakdown]:
    """det + λa·attr + λc·cont + λf·fp + λr·cen, plus its logged breakdown.

    Raises:
        NonFiniteLossError: a component (or the total) is NaN or infinite.
    """
    values = {}
    for name in COMPONENTS:
        value = float(components[name].detach())
        if not math.isfinite(value):
            raise NonFiniteLossError(name, value)
        values[name] = value
    total = (
        components["det"]
        + weights.attr * components["attr"]
        + weights.cont * components["cont"]
        + weights.fp * components["fp"]
        + weights.cen * components["cen"]
    )
    total_value = float(total.detach())
    if not math.isfinite(total_value):
        raise NonFiniteLossError("total", total_value)
    return total, LossBreakdown(**values, total=total_value)


@dataclass(frozen=True)
class LossResult:
    total: torch.Tensor
    breakdown: LossBreakdown
    fp_groups: int


class LossComputer:
    """Evaluates all five objectives on one batch against the current centroid table."""

    def __init__(self, weights: LossWeights, table: CentroidTable) -> None:
        self.weights = weights
        self.table = table

    def components(self, output: ModelOutput, batch: Batch) -> tuple[dict[str, torch.Tensor], int]:
        w = self.weights
        emb, heads = output.embeddings, output.heads
        if w.cont_exclude_fake:
            real = batch.y == 0
            cont = info_nce(emb.p_v[real], emb.p_a[real], w.temperature) if bool(real.any()) else emb.p_v.new_zeros(())
        else:
            cont = info_nce(emb.p_v, emb.p_a, w.temperature)
        groups = len(eligible_groups(batch.g))
        if not groups:
            logger.debug("No generator group with two or more samples; fingerprint loss is 0 this step")
        components = {
            "det": focal_loss(heads.detect_prob, batch.y, w.alpha, w.gamma, alpha_on_fake=w.alpha_on_fake),
            "attr": attribution_ce(heads.attr_probs, batch.g),
            "cont": cont,
            "fp": cmffc_loss(emb.p_v, emb.p_a, batch.g, w.temperature),
            "cen": centroid_loss(emb.z_f, batch.g, self.table, only_updated=w.defer_centroid_loss),
        }
        return components, groups

    def __call__(self, output: ModelOutput, batch: Batch) -> LossResult:
        components, groups = self.components(output, batch)
        total, breakdown = total_loss(components, self.weights)
        return LossResult(total=total, breakdown=breakdown, fp_groups=groups)
