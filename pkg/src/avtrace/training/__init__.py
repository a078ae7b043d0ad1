"""Training loop, schedule and optimizer."""

from avtrace.training.loop import CHECKPOINT_DIR, LOG_FILE, TrainResult, ablate, train
from avtrace.training.schedule import (
    build_optimizer,
    build_scheduler,
    clip_gradients,
    cosine_factor,
    cosine_lr,
)

__all__ = [
    "CHECKPOINT_DIR",
    "LOG_FILE",
    "TrainResult",
    "ablate",
    "build_optimizer",
    "build_scheduler",
    "clip_gradients",
    "cosine_factor",
    "cosine_lr",
    "train",
]
