"""Eval-mode inference over a dataset."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
from torch.utils.data import DataLoader

from avtrace.datapipe import ClipDataset, collate_samples
from avtrace.model import AttributionDetector

REPRESENTATIONS = ("z_v", "z_a", "z_f", "p_v", "p_a")


@dataclass
class Predictions:
    source_ids: list[str]
    y: np.ndarray
    g: np.ndarray
    detect_prob: np.ndarray
    attr_probs: np.ndarray
    embeddings: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.source_ids)


@torch.no_grad()
def predict(
    model: AttributionDetector, dataset: ClipDataset, *, batch_size: int = 16, num_workers: int = 0
) -> Predictions:
    """Run the model over ``dataset`` in order; the model's train/eval mode is restored afterwards."""
    was_training = model.training
    model.eval()
    loader = DataLoader(
        dataset,
        batch_size=batch_size,
        shuffle=False,
        collate_fn=collate_samples,
        num_workers=num_workers,
        generator=torch.Generator().manual_seed(0),
    )
    ids: list[str] = []
    ys, gs, probs, attrs = [], [], [], []
    vectors: dict[str, list[np.ndarray]] = {name: [] for name in REPRESENTATIONS}
    try:
        for batch in loader:
            if len(batch) == 0:
                continue
            out = model.run_batch(batch)
            ids.extend(batch.source_ids)
            ys.append(batch.y.numpy())
            gs.append(batch.g.numpy())
            probs.append(out.heads.detect_prob.numpy())
            attrs.append(out.heads.attr_probs.numpy())
            for name in REPRESENTATIONS:
                vectors[name].append(out.embeddings.get(name).numpy())
    finally:
        model.train(was_training)
    if not ids:
        raise ValueError(f"split {dataset.split!r} produced no samples")
    return Predictions(
        source_ids=ids,
        y=np.concatenate(ys),
        g=np.concatenate(gs),
        detect_prob=np.concatenate(probs),
        attr_probs=np.concatenate(attrs),
        embeddings={name: np.concatenate(parts) for name, parts in vectors.items()},
    )
