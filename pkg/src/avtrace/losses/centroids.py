from __future__ import annotations

import numpy as np
import torch


class CentroidTable:
    """Per-class prototypes of the fused embedding, tracked by exponential moving average.

    Starts at zero. ``updated[k]`` becomes true the first time class k appears
    in a batch.
    """

    def __init__(self, num_classes: int, dim: int, dtype: torch.dtype = torch.float32) -> None:
        self.centroids = torch.zeros(num_classes, dim, dtype=dtype)
        self.updated = torch.zeros(num_classes, dtype=torch.bool)

    @property
    def num_classes(self) -> int:
        return self.centroids.shape[0]

    @torch.no_grad()
    def update(self, z_f: torch.Tensor, g: torch.Tensor, momentum: float) -> "CentroidTable":
        """C[k] <- m C[k] + (1 - m) mean(z_f[g == k]) for every class k present in ``g``."""
        z = z_f.detach().to(self.centroids.dtype)
        for k in torch.unique(g).tolist():
            mean = z[g == k].mean(dim=0)
            self.centroids[k] = momentum * self.centroids[k] + (1.0 - momentum) * mean
            self.updated[k] = True
        return self

    def snapshot(self) -> "CentroidTable":
        copy = CentroidTable(self.num_classes, self.centroids.shape[1], self.centroids.dtype)
        copy.centroids.copy_(self.centroids)
        copy.updated.copy_(self.updated)
        return copy

    def to_arrays(self) -> dict[str, np.ndarray]:
        return {"centroids": self.centroids.numpy().copy(), "updated": self.updated.numpy().astype(np.int64)}

    @classmethod
    def from_arrays(cls, centroids: np.ndarray, updated: np.ndarray) -> "CentroidTable":
        table = cls(centroids.shape[0], centroids.shape[1])
        table.centroids.copy_(torch.from_numpy(centroids))
        table.updated.copy_(torch.from_numpy(updated.astype(bool)))
        return table


def update_centroids(table: CentroidTable, z_f: torch.Tensor, g: torch.Tensor, momentum: float) -> CentroidTable:
    return table.update(z_f, g, momentum)
