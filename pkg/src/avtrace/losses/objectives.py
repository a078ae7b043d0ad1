"""The five training objectives.

Every loss is mean-reduced over the batch (or over groups for the
fingerprint-consistency loss). Log terms clamp probabilities at ``PROB_EPS``.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from avtrace.losses.centroids import CentroidTable

PROB_EPS = 1e-7


def focal_loss(
    detect_prob: torch.Tensor,
    y: torch.Tensor,
    alpha: float = 0.75,
    gamma: float = 2.0,
    *,
    alpha_on_fake: bool = True,
) -> torch.Tensor:
    """Mean of -α_t (1 - p_t)^γ log p_t.

    p_t is the probability of the true class; α_t is ``alpha`` for fakes
    (y = 1) and ``1 - alpha`` for reals, or the reverse when ``alpha_on_fake``
    is False.
    """
    p = detect_prob.clamp(PROB_EPS, 1.0 - PROB_EPS)
    fake = y.to(torch.bool)
    p_t = torch.where(fake, p, 1.0 - p)
    a_fake = alpha if alpha_on_fake else 1.0 - alpha
    alpha_t = torch.where(fake, torch.full_like(p, a_fake), torch.full_like(p, 1.0 - a_fake))
    return (-alpha_t * (1.0 - p_t).pow(gamma) * torch.log(p_t)).mean()


def attribution_ce(attr_probs: torch.Tensor, g: torch.Tensor) -> torch.Tensor:
    """Mean of -log P(true generator)."""
    true_prob = attr_probs.gather(1, g.long().unsqueeze(1)).squeeze(1)
    return -torch.log(true_prob.clamp_min(PROB_EPS)).mean()


def info_nce(p_v: torch.Tensor, p_a: torch.Tensor, temperature: float = 0.07) -> torch.Tensor:
    """Symmetric InfoNCE: the average of the visual->audio and audio->visual directions.

    Row i of each side is the positive for row i of the other; all other rows
    are negatives. A single pair has nothing to contrast and scores 0.
    """
    if p_v.shape[0] == 0:
        raise ValueError("info_nce needs at least one pair")
    if p_v.shape != p_a.shape:
        raise ValueError(f"projection shapes differ: {tuple(p_v.shape)} vs {tuple(p_a.shape)}")
    logits = p_v @ p_a.T / temperature
    targets = torch.arange(p_v.shape[0], device=p_v.device)
    return 0.5 * (F.cross_entropy(logits, targets) + F.cross_entropy(logits.T, targets))


def eligible_groups(g: torch.Tensor) -> list[int]:
    """Fake generator ids with at least two samples in the batch."""
    ids, counts = torch.unique(g, return_counts=True)
    return [int(k) for k, n in zip(ids.tolist(), counts.tolist()) if k >= 1 and n >= 2]


def cmffc_loss(p_v: torch.Tensor, p_a: torch.Tensor, g: torch.Tensor, temperature: float = 0.07) -> torch.Tensor:
    """Within-generator InfoNCE averaged over eligible fake groups.

    Reals and singleton groups are skipped; with no eligible group the loss is 0.
    """
    groups = eligible_groups(g)
    if not groups:
        return p_v.new_zeros(())
    terms = [info_nce(p_v[g == k], p_a[g == k], temperature) for k in groups]
    return torch.stack(terms).mean()


def centroid_loss(
    z_f: torch.Tensor, g: torch.Tensor, table: CentroidTable, *, only_updated: bool = False
) -> torch.Tensor:
    """Mean squared distance of each fused embedding to its class centroid.

    Centroids are constants here. With ``only_updated`` samples whose class
    centroid has never been updated are left out.
    """
    targets = table.centroids.detach().to(z_f.dtype)[g]
    distances = (z_f - targets).pow(2).sum(dim=-1)
    if only_updated:
        active = table.updated[g]
        if not bool(active.any()):
            return z_f.new_zeros(())
        distances = distances[active]
    return distances.mean()
