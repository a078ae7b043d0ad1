"""Seeding helpers.

Every source of randomness in a run derives from the run seed through a
named stream, so switching one component off (an ablation) never shifts the
random draws seen by another.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np
import torch


def stream_seed(seed: int, name: str, *parts: int) -> int:
    """Deterministic 63-bit seed for the stream ``name`` under the run ``seed``.

    Usage:
        stream_seed(0, "augment", epoch, index)
    """
    blob = ":".join([str(seed), name, *(str(p) for p in parts)])
    digest = hashlib.sha256(blob.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def numpy_stream(seed: int, name: str, *parts: int) -> np.random.Generator:
    return np.random.default_rng(stream_seed(seed, name, *parts))


def torch_stream(seed: int, name: str, *parts: int) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(stream_seed(seed, name, *parts))
    return generator


def seed_everything(seed: int) -> None:
    """Seed the global generators and request deterministic kernels.

    The global torch stream is the one dropout draws from.
    """
    random.seed(stream_seed(seed, "python"))
    np.random.seed(stream_seed(seed, "numpy") % 2**32)
    torch.manual_seed(stream_seed(seed, "dropout"))
    torch.use_deterministic_algorithms(True, warn_only=True)
