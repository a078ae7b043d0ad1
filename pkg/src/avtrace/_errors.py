"""Exception hierarchy for avtrace."""

from __future__ import annotations

from pathlib import Path


class AvtraceError(Exception):
    """Root of every error raised by avtrace."""


class ConfigError(AvtraceError, ValueError):
    """Invalid run configuration, ablation flag or representation tag."""


class ManifestError(AvtraceError, ValueError):
    """Manifest violates a split or label invariant."""


class MediaError(AvtraceError):
    """Referenced media is missing, corrupt or non-finite."""

    def __init__(self, source: str, message: str) -> None:
        self.source = source
        super().__init__(f"{source}: {message}")


class NonFiniteLossError(AvtraceError, FloatingPointError):
    """A loss component evaluated to NaN or infinity."""

    def __init__(self, component: str, value: float) -> None:
        self.component = component
        self.value = value
        super().__init__(f"loss component '{component}' is not finite ({value})")


class GradientError(AvtraceError, FloatingPointError):
    """Gradients are not finite."""


class CheckpointError(AvtraceError):
    """Checkpoint directory is missing or unreadable."""


class TrainingAborted(AvtraceError):
    """Training stopped early; ``checkpoint`` is the last good state (or None)."""

    def __init__(self, message: str, checkpoint: Path | None) -> None:
        self.checkpoint = checkpoint
        suffix = f" (last good checkpoint: {checkpoint})" if checkpoint else " (no checkpoint written yet)"
        super().__init__(message + suffix)
