"""Checkpoint directories.

A checkpoint is a directory holding

    weights.f32 / weights.meta      every floating tensor of the model, flat float32
    counters.i64 / counters.meta    integer buffers (batch-norm step counters), flat int64
    weights.json                    name, shape, dtype and offset of each tensor
    centroids.f32, centroid_flags.i64 (+ .meta)
    training_state.pt               optimizer, schedule and random-generator states
    config.yaml                     the run configuration echo
    metrics.json                    latest validation report (or null)
    checkpoint.json                 epoch, step, class count, generator names

Directories are written to a temporary sibling and renamed into place, so an
interrupted write never replaces the previous checkpoint.
"""

from __future__ import annotations

import json
import logging
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import torch

from avtrace._cache import read_array, write_array
from avtrace._errors import CheckpointError, ConfigError
from avtrace.config import RunConfig, dump_config, load_config
from avtrace.losses import CentroidTable
from avtrace.model import AttributionDetector
from avtrace.models import MetricsReport

logger = logging.getLogger("avtrace.checkpoint")

INDEX_FILE = "weights.json"
STATE_FILE = "training_state.pt"
META_FILE = "checkpoint.json"


def _write_weights(path: Path, state: dict[str, torch.Tensor]) -> None:
    index = []
    floats: list[np.ndarray] = []
    ints: list[np.ndarray] = []
    offsets = {"float32": 0, "int64": 0}
    for name, tensor in state.items():
        array = tensor.detach().cpu().numpy()
        kind = "float32" if tensor.is_floating_point() else "int64"
        (floats if kind == "float32" else ints).append(array.reshape(-1))
        index.append({"name": name, "shape": list(array.shape), "dtype": kind, "offset": offsets[kind]})
        offsets[kind] += array.size
    write_array(path / "weights.f32", np.concatenate(floats) if floats else np.zeros(0, np.float32))
    write_array(path / "counters.i64", np.concatenate(ints) if ints else np.zeros(0, np.int64))
    (path / INDEX_FILE).write_text(json.dumps(index, indent=1))


def _read_weights(path: Path) -> dict[str, torch.Tensor]:
    index = json.loads((path / INDEX_FILE).read_text())
    blobs = {"float32": read_array(path / "weights.f32"), "int64": read_array(path / "counters.i64")}
    state = {}
    for item in index:
        size = int(np.prod(item["shape"], dtype=np.int64))
        flat = blobs[item["dtype"]][item["offset"] : item["offset"] + size]
        state[item["name"]] = torch.from_numpy(flat.reshape(item["shape"]).copy())
    return state


@dataclass
class Checkpoint:
    path: Path
    config: RunConfig
    model: AttributionDetector
    centroids: CentroidTable
    epoch: int
    """Completed epochs."""
    step: int
    generator_names: dict[int, str]
    metrics: MetricsReport | None = None
    best_score: float | None = None

    @property
    def num_classes(self) -> int:
        return self.model.num_classes

    def training_state(self) -> dict[str, Any]:
        state_path = self.path / STATE_FILE
        if not state_path.exists():
            raise CheckpointError(f"{self.path} has no training state to resume from")
        return torch.load(state_path, weights_only=True)


def save_checkpoint(
    path: str | Path,
    *,
    model: AttributionDetector,
    centroids: CentroidTable,
    config: RunConfig,
    epoch: int,
    step: int,
    generator_names: dict[int, str],
    training_state: dict[str, Any] | None = None,
    metrics: MetricsReport | None = None,
    best_score: float | None = None,
) -> Path:
    final = Path(path)
    tmp = final.with_name(final.name + ".tmp")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)

    _write_weights(tmp, model.state_dict())
    arrays = centroids.to_arrays()
    write_array(tmp / "centroids.f32", arrays["centroids"])
    write_array(tmp / "centroid_flags.i64", arrays["updated"])
    if training_state is not None:
        torch.save(training_state, tmp / STATE_FILE)
    dump_config(config, tmp / "config.yaml")
    (tmp / "metrics.json").write_text(json.dumps(metrics.to_dict() if metrics else None, indent=2))
    meta = {
        "epoch": epoch,
        "step": step,
        "num_classes": model.num_classes,
        "generator_names": {str(g): n for g, n in sorted(generator_names.items())},
        "best_score": best_score,
    }
    (tmp / META_FILE).write_text(json.dumps(meta, indent=2))

    if final.exists():
        shutil.rmtree(final)
    tmp.rename(final)
    logger.info("Wrote checkpoint %s (epoch %d, step %d)", final, epoch, step)
    return final


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Rebuild the model (in eval mode) and centroid table from a checkpoint directory.

    Raises:
        CheckpointError: the directory is missing or incomplete.
    """
    p = Path(path)
    if not (p / META_FILE).exists():
        raise CheckpointError(f"not a checkpoint directory: {p}")
    try:
        meta = json.loads((p / META_FILE).read_text())
        config = load_config(p / "config.yaml")
        model = AttributionDetector(config, meta["num_classes"])
        model.load_state_dict(_read_weights(p), strict=True)
        centroids = CentroidTable.from_arrays(read_array(p / "centroids.f32"), read_array(p / "centroid_flags.i64"))
        metrics_payload = json.loads((p / "metrics.json").read_text())
    except (OSError, KeyError, ValueError, RuntimeError) as exc:
        if isinstance(exc, ConfigError):
            raise CheckpointError(f"{p}: invalid config echo: {exc}") from exc
        raise CheckpointError(f"{p}: {exc}") from exc
    model.eval()
    return Checkpoint(
        path=p,
        config=config,
        model=model,
        centroids=centroids,
        epoch=int(meta["epoch"]),
        step=int(meta["step"]),
        generator_names={int(g): n for g, n in meta["generator_names"].items()},
        metrics=MetricsReport.model_validate(metrics_payload) if metrics_payload else None,
        best_score=meta.get("best_score"),
    )
