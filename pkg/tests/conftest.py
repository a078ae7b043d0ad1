"""Shared fixtures for avtrace tests."""

from __future__ import annotations

from collections.abc import Iterator
from pathlib import Path
from typing import Any

import pytest

from avtrace._cache import CACHE_DIR_ENV
from avtrace.config import RunConfig, build_config
from avtrace.models import DatasetManifest
from avtrace.report import TerminalReporter
from avtrace.synthesizers import generate_synthetic
from avtrace.training import TrainResult, train

# ---------------------------------------------------------------------------
# Reports collected by end-to-end tests, printed after the run
# ---------------------------------------------------------------------------
_reporter = TerminalReporter()

# A run small enough to train in seconds on a CPU: 2 frames of 16x16 px, D = 16.
TINY: dict[str, Any] = {
    "data": {"frames_per_clip": 2, "frame_size": 16},
    "synth": {"frames_per_clip": 2, "frame_size": 16, "decoded_frames": 4, "generators": 2, "n_per_class": 2},
    "encoder": {"embed_dim": 16, "attention_heads": 2, "backbone_width": 4},
    "train": {"epochs": 2, "batch_size": 2},
    "eval": {"batch_size": 4},
}


# ---------------------------------------------------------------------------
# CLI option & marker for slow tests
# ---------------------------------------------------------------------------
def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="Run end-to-end trainings on the desk-scale synthetic dataset (several minutes).",
    )


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line(
        "markers",
        "slow: end-to-end trainings on the synthetic dataset (skipped unless --slow is passed)",
    )


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --slow flag to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_terminal_summary(terminalreporter: Any, exitstatus: int, config: pytest.Config) -> None:
    """Print the metrics of every end-to-end run."""
    if _reporter.total == 0:
        return
    terminalreporter.write_line(_reporter.summary())


@pytest.fixture(scope="session")
def metrics_reporter() -> TerminalReporter:
    return _reporter


# ---------------------------------------------------------------------------
# Spectrogram cache kept out of the working directory
# ---------------------------------------------------------------------------
@pytest.fixture(scope="session", autouse=True)
def session_cache_dir(tmp_path_factory: pytest.TempPathFactory) -> Iterator[Path]:
    with pytest.MonkeyPatch.context() as mp:
        path = tmp_path_factory.mktemp("cache")
        mp.setenv(CACHE_DIR_ENV, str(path))
        yield path


# ---------------------------------------------------------------------------
# Configuration and data fixtures
# ---------------------------------------------------------------------------
def tiny_payload(**overrides: dict[str, Any]) -> dict[str, Any]:
    """TINY with per-section overrides merged in."""
    payload = {section: dict(values) for section, values in TINY.items()}
    for section, values in overrides.items():
        payload.setdefault(section, {}).update(values)
    return payload


@pytest.fixture
def tiny_config() -> RunConfig:
    return build_config(tiny_payload())


@pytest.fixture(scope="session")
def synthetic_dataset(tmp_path_factory: pytest.TempPathFactory) -> tuple[Path, DatasetManifest]:
    """A tiny synthetic dataset: 2 generators + real, 2 clips per class per split."""
    root = tmp_path_factory.mktemp("synthetic")
    manifest = generate_synthetic(build_config(tiny_payload()).synth, root)
    return root, manifest


@pytest.fixture(scope="session")
def trained_run(
    tmp_path_factory: pytest.TempPathFactory, synthetic_dataset: tuple[Path, DatasetManifest]
) -> TrainResult:
    """Two epochs of training on the tiny dataset."""
    _, manifest = synthetic_dataset
    return train(manifest, build_config(tiny_payload()), tmp_path_factory.mktemp("run"))
