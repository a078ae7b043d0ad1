"""Optimizer, cosine learning-rate schedule and gradient clipping."""

from __future__ import annotations

import math
from collections.abc import Iterable

import torch
from torch import nn
from torch.optim import AdamW
from torch.optim.lr_scheduler import LambdaLR

from avtrace._errors import GradientError
from avtrace.config import TrainConfig


def cosine_factor(epoch: int, epochs: int) -> float:
    """½(1 + cos(π e / E)): 1 at epoch 0, 0 at epoch E."""
    return 0.5 * (1.0 + math.cos(math.pi * min(epoch, epochs) / epochs))


def cosine_lr(base_lr: float, epoch: int, epochs: int) -> float:
    return base_lr * cosine_factor(epoch, epochs)


def build_optimizer(model: nn.Module, config: TrainConfig) -> AdamW:
    """AdamW with decoupled weight decay applied to every parameter."""
    return AdamW(
        model.parameters(),
        lr=config.learning_rate,
        betas=config.betas,
        eps=config.eps,
        weight_decay=config.weight_decay,
    )


def build_scheduler(optimizer: torch.optim.Optimizer, epochs: int) -> LambdaLR:
    """Single-cycle cosine annealing to zero, stepped once per epoch."""
    return LambdaLR(optimizer, lr_lambda=lambda epoch: cosine_factor(epoch, epochs))


def clip_gradients(parameters: Iterable[torch.Tensor], clip_norm: float) -> float:
    """Rescale gradients in place so their global ℓ2 norm is at most ``clip_norm``.

    Returns the norm before clipping.

    Raises:
        GradientError: a gradient contains NaN or infinity.
    """
    try:
        norm = torch.nn.utils.clip_grad_norm_(parameters, clip_norm, error_if_nonfinite=True)
    except RuntimeError as exc:
        raise GradientError(f"non-finite gradient norm: {exc}") from exc
    return float(norm)
