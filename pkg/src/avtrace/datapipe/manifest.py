"""Manifest I/O.

A manifest is newline-delimited JSON, one flat record per clip:

    {"video_path": ..., "audio_path": ..., "y": 1, "g": 2, "split": "train", "source_id": ...}

Media paths are relative to the manifest's directory. Generator display names
live next to it in ``generators.json``; without that file names default to
``real`` / ``gen<g>``.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import ValidationError

from avtrace._errors import ManifestError
from avtrace.models import DatasetManifest, ManifestEntry

GENERATORS_FILE = "generators.json"


def _default_names(entries: list[ManifestEntry]) -> dict[int, str]:
    top = max((e.g for e in entries), default=0)
    return {g: "real" if g == 0 else f"gen{g}" for g in range(top + 1)}


def build_manifest(
    entries: list[ManifestEntry], generator_names: dict[int, str] | None = None, *, root: str | Path = "."
) -> DatasetManifest:
    try:
        return DatasetManifest(
            entries=entries,
            generator_names=generator_names if generator_names is not None else _default_names(entries),
            root=str(root),
        )
    except ValidationError as exc:
        raise ManifestError(str(exc)) from exc


def read_manifest(path: str | Path) -> DatasetManifest:
    p = Path(path)
    if not p.exists():
        raise ManifestError(f"manifest not found: {p}")
    entries: list[ManifestEntry] = []
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entries.append(ManifestEntry.model_validate(json.loads(line)))
        except (json.JSONDecodeError, ValidationError) as exc:
            raise ManifestError(f"{p}:{lineno}: {exc}") from exc
    names_path = p.parent / GENERATORS_FILE
    names = None
    if names_path.exists():
        names = {int(k): str(v) for k, v in json.loads(names_path.read_text(encoding="utf-8")).items()}
    return build_manifest(entries, names, root=p.parent)


def write_manifest(manifest: DatasetManifest, path: str | Path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(e.model_dump(mode="json"), sort_keys=True) for e in manifest.entries]
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    names = {str(g): name for g, name in sorted(manifest.generator_names.items())}
    (p.parent / GENERATORS_FILE).write_text(json.dumps(names, indent=2), encoding="utf-8")
    return p


def resolve(manifest: DatasetManifest, relpath: str) -> Path:
    path = Path(relpath)
    return path if path.is_absolute() else Path(manifest.root) / path
