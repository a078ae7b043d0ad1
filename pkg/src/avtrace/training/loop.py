"""The training procedure.

Per batch: forward through both encoders, cross-modal attention, fusion, heads
and projections; the five losses and their weighted total; backward; global
norm clipping; optimizer step; then the EMA centroid update. The learning rate
is annealed once per epoch. Validation runs every ``eval_every`` epochs; the
``last`` checkpoint is rewritten each epoch and ``best`` tracks validation
balanced accuracy.
"""

from __future__ import annotations

import json
import logging
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import torch
from torch.utils.data import DataLoader

from avtrace._cache import ArrayCache
from avtrace._errors import GradientError, ManifestError, NonFiniteLossError, TrainingAborted
from avtrace._helpers import seed_everything, torch_stream
from avtrace._protocols import MediaReader
from avtrace.checkpoint import load_checkpoint, save_checkpoint
from avtrace.config import RunConfig, apply_ablation, dump_config
from avtrace.datapipe import ClipDataset, build_sampler, collate_samples, make_weighted_sampler
from avtrace.evaluators.metrics import compute_metrics
from avtrace.evaluators.predict import predict
from avtrace.losses import CentroidTable, LossComputer
from avtrace.model import AttributionDetector
from avtrace.models import DatasetManifest, EpochRecord, MetricsReport, StepRecord
from avtrace.training.schedule import build_optimizer, build_scheduler, clip_gradients

logger = logging.getLogger("avtrace.training")

LOG_FILE = "train_log.jsonl"
CHECKPOINT_DIR = "checkpoints"


@dataclass
class TrainResult:
    out_dir: Path
    last: Path | None
    best: Path | None
    log: Path
    epochs_completed: int
    history: list[EpochRecord] = field(default_factory=list)


def _validate(
    model: AttributionDetector, dataset: ClipDataset | None, config: RunConfig, names: dict[int, str]
) -> MetricsReport | None:
    if dataset is None:
        return None
    predictions = predict(model, dataset, batch_size=config.eval.batch_size, num_workers=config.data.num_workers)
    return compute_metrics(
        predictions.y,
        predictions.g,
        predictions.detect_prob,
        predictions.attr_probs,
        threshold=config.eval.threshold,
        split="val",
        generator_names=names,
    )


def train(
    manifest: DatasetManifest,
    config: RunConfig,
    out_dir: str | Path,
    *,
    resume_from: str | Path | None = None,
    stop_after: int | None = None,
    reader: MediaReader | None = None,
    cache: ArrayCache | None = None,
) -> TrainResult:
    """Train on the manifest's ``train`` split and write checkpoints and the log under ``out_dir``.

    ``resume_from`` continues from a ``last`` checkpoint, appending to the existing log once
    records written after that checkpoint are dropped; ``stop_after`` ends the run once that
    many epochs are complete while keeping the full-length schedule.

    Raises:
        ManifestError: the train split is empty.
        TrainingAborted: a loss or gradient became non-finite.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not manifest.split("train"):
        raise ManifestError("train split is empty")
    tc = config.train
    seed_everything(tc.seed)

    num_classes = manifest.num_classes
    model = AttributionDetector(config, num_classes)
    model.log_summary()
    table = CentroidTable(num_classes, 2 * config.encoder.embed_dim)
    optimizer = build_optimizer(model, tc)
    scheduler = build_scheduler(optimizer, tc.epochs)
    computer = LossComputer(config.loss, table)

    dataset = ClipDataset(
        manifest, "train", config.data, augment=True, strict=False, seed=tc.seed, reader=reader, cache=cache
    )
    sampler_generator = torch_stream(tc.seed, "sampler")
    loader_generator = torch_stream(tc.seed, "loader")
    loader = DataLoader(
        dataset,
        batch_size=tc.batch_size,
        sampler=build_sampler(make_weighted_sampler(manifest, "train"), len(dataset), sampler_generator),
        collate_fn=collate_samples,
        num_workers=config.data.num_workers,
        generator=loader_generator,
    )
    val_dataset = None
    if manifest.split("val"):
        val_dataset = ClipDataset(manifest, "val", config.data, strict=True, reader=reader, cache=cache)

    ckpt_root = out / CHECKPOINT_DIR
    last_path, best_path = ckpt_root / "last", ckpt_root / "best"
    log_path = out / LOG_FILE
    start_epoch, step, best_score = 0, 0, None
    last_good: Path | None = None

    if resume_from is not None:
        ckpt = load_checkpoint(resume_from)
        state = ckpt.training_state()
        model.load_state_dict(ckpt.model.state_dict())
        table.centroids.copy_(ckpt.centroids.centroids)
        table.updated.copy_(ckpt.centroids.updated)
        optimizer.load_state_dict(state["optimizer"])
        scheduler.load_state_dict(state["scheduler"])
        torch.set_rng_state(state["torch_rng"])
        sampler_generator.set_state(state["sampler_rng"])
        loader_generator.set_state(state["loader_rng"])
        start_epoch, step, best_score = ckpt.epoch, ckpt.step, ckpt.best_score
        last_good = Path(resume_from)
        _rewind_log(log_path, start_epoch, step)
        logger.info("Resuming from %s at epoch %d, step %d", resume_from, start_epoch, step)
    else:
        log_path.write_text("")
    dump_config(config, out / "config.yaml")

    def training_state() -> dict[str, Any]:
        return {
            "optimizer": optimizer.state_dict(),
            "scheduler": scheduler.state_dict(),
            "torch_rng": torch.get_rng_state(),
            "sampler_rng": sampler_generator.get_state(),
            "loader_rng": loader_generator.get_state(),
        }

    history: list[EpochRecord] = []
    end_epoch = tc.epochs if stop_after is None else min(tc.epochs, stop_after)
    model.train()
    with log_path.open("a", encoding="utf-8") as log:
        for epoch in range(start_epoch, end_epoch):
            dataset.set_epoch(epoch)
            lr = optimizer.param_groups[0]["lr"]
            totals: list[float] = []
            fp_skipped = skipped = 0
            for batch in loader:
                skipped += batch.skipped
                if len(batch) == 0:
                    continue
                output = model.run_batch(batch)
                try:
                    result = computer(output, batch)
                    optimizer.zero_grad(set_to_none=True)
                    result.total.backward()
                    clip_gradients(model.parameters(), tc.clip_norm)
                except (NonFiniteLossError, GradientError) as exc:
                    logger.error("Aborting at epoch %d step %d: %s", epoch, step, exc)
                    raise TrainingAborted(str(exc), last_good) from exc
                optimizer.step()
                table.update(output.embeddings.z_f, batch.g, config.loss.momentum)

                step += 1
                fp_skipped += int(result.fp_groups == 0)
                totals.append(result.breakdown.total)
                record = StepRecord(
                    step=step,
                    epoch=epoch,
                    lr=lr,
                    **result.breakdown.model_dump(),
                    fp_groups=result.fp_groups,
                )
                log.write(record.model_dump_json() + "\n")
            scheduler.step()

            report = None
            if (epoch + 1) % tc.eval_every == 0 or epoch + 1 == tc.epochs:
                report = _validate(model, val_dataset, config, manifest.generator_names)
            epoch_record = EpochRecord(
                epoch=epoch,
                lr=lr,
                steps=len(totals),
                mean_total=sum(totals) / len(totals) if totals else 0.0,
                fp_skipped_steps=fp_skipped,
                skipped_samples=skipped,
                val_balanced_accuracy=report.balanced_accuracy if report else None,
                val_attribution_accuracy=report.attribution_accuracy if report else None,
            )
            log.write(epoch_record.model_dump_json() + "\n")
            log.flush()
            history.append(epoch_record)
            logger.info(
                "epoch %d lr %.3g steps %d loss %.4f val bal.acc %s attr %s",
                epoch,
                lr,
                len(totals),
                epoch_record.mean_total,
                epoch_record.val_balanced_accuracy,
                epoch_record.val_attribution_accuracy,
            )
            if skipped:
                logger.warning("epoch %d skipped %d unreadable samples", epoch, skipped)

            improved = report is not None and report.balanced_accuracy is not None and (
                best_score is None or report.balanced_accuracy > best_score
            )
            if improved:
                best_score = report.balanced_accuracy  # type: ignore[union-attr]
            last_good = save_checkpoint(
                last_path,
                model=model,
                centroids=table,
                config=config,
                epoch=epoch + 1,
                step=step,
                generator_names=manifest.generator_names,
                training_state=training_state(),
                metrics=report,
                best_score=best_score,
            )
            if improved or (val_dataset is None and epoch + 1 == tc.epochs):
                _copy_checkpoint(last_path, best_path)

    return TrainResult(
        out_dir=out,
        last=last_path if last_path.exists() else None,
        best=best_path if best_path.exists() else None,
        log=log_path,
        epochs_completed=max(start_epoch, end_epoch),
        history=history,
    )


def _rewind_log(path: Path, epoch: int, step: int) -> None:
    """Drop log records written after the checkpoint taken at (``epoch``, ``step``)."""
    if not path.exists():
        return
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    kept = []
    for line in lines:
        payload = json.loads(line)
        if (payload["step"] <= step) if payload["kind"] == "step" else (payload["epoch"] < epoch):
            kept.append(line + "\n")
    dropped = len(lines) - len(kept)
    if dropped:
        logger.warning("Dropping %d log record(s) written after step %d", dropped, step)
    path.write_text("".join(kept), encoding="utf-8")


def _copy_checkpoint(src: Path, dst: Path) -> None:
    tmp = dst.with_name(dst.name + ".tmp")
    if tmp.exists():
        shutil.rmtree(tmp)
    shutil.copytree(src, tmp)
    if dst.exists():
        shutil.rmtree(dst)
    tmp.rename(dst)
    logger.info("Best checkpoint updated: %s", dst)


def ablate(
    manifest: DatasetManifest,
    config: RunConfig,
    out_dir: str | Path,
    disable: set[str] | frozenset[str],
    **kwargs: Any,
) -> TrainResult:
    """Train with the named components switched off, everything else unchanged.

    Raises:
        ConfigError: ``disable`` holds an unknown flag.
    """
    return train(manifest, apply_ablation(config, disable), out_dir, **kwargs)
