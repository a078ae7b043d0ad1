"""Run configuration.

One YAML (or JSON) file configures every stage. The file is deep-merged over a
scale preset and validated; unknown keys are rejected at every level. An empty
file under a preset reproduces that scale's default hyperparameters.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from avtrace._errors import ConfigError

Preset = Literal["desk", "paper"]
ABLATION_FLAGS = frozenset({"attr", "cont", "fp", "cen", "cma_module"})


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DataConfig(_Section):
    frames_per_clip: int = Field(8, ge=1)
    frame_size: int = Field(64, ge=8)
    flip_prob: float = Field(0.5, ge=0.0, le=1.0)
    jitter_prob: float = Field(0.8, ge=0.0, le=1.0)
    jitter_strength: float = Field(0.2, ge=0.0, lt=1.0)
    grayscale_prob: float = Field(0.1, ge=0.0, le=1.0)
    mean: tuple[float, float, float] = (0.485, 0.456, 0.406)
    std: tuple[float, float, float] = (0.229, 0.224, 0.225)
    num_workers: int = Field(0, ge=0)


class SynthConfig(_Section):
    generators: int = Field(3, ge=2)
    n_per_class: int = Field(50, ge=2)
    fingerprint_amplitude: float = Field(0.15, ge=0.0)
    noise_level: float = Field(0.05, ge=0.0)
    seed: int = 0
    frames_per_clip: int = Field(8, ge=1)
    frame_size: int = Field(64, ge=8)
    decoded_frames: int = Field(8, ge=1)
    """Frames written per clip; the loader subsamples ``frames_per_clip`` of them."""
    generator_names: list[str] | None = None


class EncoderConfig(_Section):
    embed_dim: int = Field(64, ge=1)
    visual_backbone: str = "small_resnet"
    audio_backbone: str = "small_resnet"
    attention_heads: int = Field(4, ge=1)
    pretrained_init: bool = False
    positional_encoding: bool = False
    backbone_width: int = Field(16, ge=4)
    """Base channel width of the ``small_resnet`` preset."""

    @model_validator(mode="after")
    def _heads_divide_dim(self) -> "EncoderConfig":
        if self.embed_dim % self.attention_heads:
            raise ValueError(f"embed_dim {self.embed_dim} not divisible by attention_heads {self.attention_heads}")
        return self


class HeadConfig(_Section):
    hidden_dim: int | None = None
    """Defaults to the embedding dimension D."""
    projection_dim: int | None = None
    """Defaults to the embedding dimension D."""
    dropout: float = Field(0.3, ge=0.0, lt=1.0)


class LossWeights(_Section):
    attr: float = Field(0.3, ge=0.0)
    cont: float = Field(0.1, ge=0.0)
    fp: float = Field(0.2, ge=0.0)
    cen: float = Field(0.05, ge=0.0)
    alpha: float = Field(0.75, gt=0.0, lt=1.0)
    gamma: float = Field(2.0, ge=0.0)
    temperature: float = Field(0.07, gt=0.0)
    momentum: float = Field(0.9, ge=0.0, lt=1.0)
    alpha_on_fake: bool = True
    """Apply ``alpha`` to the fake class (y=1) and ``1 - alpha`` to reals; False inverts."""
    defer_centroid_loss: bool = False
    """Skip the centroid pull for classes whose prototype has never been updated."""
    cont_exclude_fake: bool = False
    """Restrict the clip-level contrastive loss to real samples."""


class TrainConfig(_Section):
    learning_rate: float = Field(1e-4, gt=0.0)
    weight_decay: float = Field(1e-4, ge=0.0)
    epochs: int = Field(50, ge=1)
    batch_size: int = Field(4, ge=1)
    clip_norm: float = Field(1.0, gt=0.0)
    seed: int = 0
    eval_every: int = Field(1, ge=1)
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    bypass_cross_attention: bool = False
    disabled: list[str] = Field(default_factory=list)
    """Ablation switches applied to this run (echoed for reproducibility)."""

    @model_validator(mode="after")
    def _known_flags(self) -> "TrainConfig":
        unknown = sorted(set(self.disabled) - ABLATION_FLAGS)
        if unknown:
            raise ValueError(f"unknown ablation flag(s) {unknown}; expected a subset of {sorted(ABLATION_FLAGS)}")
        return self


class EvalConfig(_Section):
    threshold: float = Field(0.5, ge=0.0, le=1.0)
    split: Literal["train", "val", "test"] = "test"
    batch_size: int = Field(16, ge=1)


class RunConfig(_Section):
    preset: Preset = "desk"
    data: DataConfig = DataConfig()
    synth: SynthConfig = SynthConfig()
    encoder: EncoderConfig = EncoderConfig()
    heads: HeadConfig = HeadConfig()
    loss: LossWeights = LossWeights()
    train: TrainConfig = TrainConfig()
    eval: EvalConfig = EvalConfig()

    @model_validator(mode="after")
    def _geometry_agrees(self) -> "RunConfig":
        if (self.synth.frames_per_clip, self.synth.frame_size) != (self.data.frames_per_clip, self.data.frame_size):
            raise ValueError("synth.frames_per_clip/frame_size must match data.frames_per_clip/frame_size")
        return self

    @property
    def hidden_dim(self) -> int:
        return self.heads.hidden_dim or self.encoder.embed_dim

    @property
    def projection_dim(self) -> int:
        return self.heads.projection_dim or self.encoder.embed_dim


PRESETS: dict[str, dict[str, Any]] = {
    "desk": {
        "data": {"frames_per_clip": 8, "frame_size": 64},
        "synth": {"frames_per_clip": 8, "frame_size": 64, "decoded_frames": 8},
        "encoder": {
            "embed_dim": 64,
            "attention_heads": 4,
            "visual_backbone": "small_resnet",
            "audio_backbone": "small_resnet",
        },
    },
    "paper": {
        "data": {"frames_per_clip": 16, "frame_size": 224},
        "synth": {"frames_per_clip": 16, "frame_size": 224, "decoded_frames": 16},
        "encoder": {
            "embed_dim": 512,
            "attention_heads": 8,
            "visual_backbone": "resnet50",
            "audio_backbone": "resnet18",
        },
    },
}


def _deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "<root>"
        if err["type"] == "extra_forbidden":
            parts.append(f"unknown key '{where}'")
        else:
            parts.append(f"{where}: {err['msg']}")
    return "; ".join(parts)


def build_config(payload: dict[str, Any] | None = None, *, preset: Preset | None = None) -> RunConfig:
    """Merge ``payload`` over a preset and validate.

    ``preset`` (e.g. from the command line) wins over a ``preset`` key in the payload.
    """
    payload = dict(payload or {})
    chosen = preset or payload.pop("preset", None) or "desk"
    payload.pop("preset", None)
    if chosen not in PRESETS:
        raise ConfigError(f"unknown preset {chosen!r}; expected one of {sorted(PRESETS)}")
    merged = _deep_merge(PRESETS[chosen], payload)
    merged["preset"] = chosen
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(_format_validation_error(exc)) from exc


def _read_payload(path: Path) -> dict[str, Any]:
    text = path.read_text()
    if path.suffix in {".yaml", ".yml"}:
        payload = yaml.safe_load(text)
    else:
        payload = json.loads(text) if text.strip() else {}
    if payload is None:
        return {}
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: top level must be a mapping, got {type(payload).__name__}")
    return payload


def load_config(path: str | Path | None = None, *, preset: Preset | None = None) -> RunConfig:
    if path is None:
        return build_config({}, preset=preset)
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return build_config(_read_payload(path), preset=preset)


def config_to_dict(config: RunConfig) -> dict[str, Any]:
    return config.model_dump(mode="json")


def dump_config(config: RunConfig, path: str | Path) -> Path:
    """Write a YAML echo of ``config`` that :func:`load_config` reads back unchanged."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(yaml.safe_dump(config_to_dict(config), sort_keys=False))
    return p


def apply_ablation(config: RunConfig, disable: set[str] | frozenset[str]) -> RunConfig:
    """Return ``config`` with the named components switched off.

    Loss flags zero the matching weight; ``cma_module`` bypasses cross-modal
    attention so the encoder embeddings are fused directly.
    """
    unknown = sorted(set(disable) - ABLATION_FLAGS)
    if unknown:
        raise ConfigError(f"unknown ablation flag(s) {unknown}; expected a subset of {sorted(ABLATION_FLAGS)}")
    loss_updates = {flag: 0.0 for flag in disable if flag != "cma_module"}
    train_updates: dict[str, Any] = {"disabled": sorted(set(config.train.disabled) | set(disable))}
    if "cma_module" in disable:
        train_updates["bypass_cross_attention"] = True
    return config.model_copy(
        update={
            "loss": config.loss.model_copy(update=loss_updates),
            "train": config.train.model_copy(update=train_updates),
        }
    )
