"""Array caching for decoded media and derived features.

Arrays are stored as flat little-endian float32 with a JSON sidecar header,
so cached frames and mel spectrograms are readable without torch or pickle.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any

import numpy as np

logger = logging.getLogger("avtrace.cache")

CACHE_DIR_ENV = "AVTRACE_CACHE_DIR"
_DEFAULT_CACHE_DIR = Path(".avtrace_cache")

_DTYPES = {"float32": "<f4", "int64": "<i8"}


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(".meta")


def write_array(path: str | Path, array: np.ndarray, **header: Any) -> Path:
    """Write ``array`` as raw little-endian data plus a ``.meta`` JSON header.

    Float arrays are stored as float32 and integer arrays as int64; extra
    keyword arguments (normalization constants, source, ...) go in the header.
    """
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    dtype = "int64" if np.issubdtype(array.dtype, np.integer) else "float32"
    data = np.ascontiguousarray(array, dtype=_DTYPES[dtype])
    p.write_bytes(data.tobytes())
    meta = {"shape": list(data.shape), "dtype": dtype, **header}
    sidecar_path(p).write_text(json.dumps(meta, indent=2, sort_keys=True))
    return p


def read_header(path: str | Path) -> dict[str, Any]:
    return json.loads(sidecar_path(Path(path)).read_text())


def read_array(path: str | Path) -> np.ndarray:
    """Inverse of :func:`write_array`. Raises ``ValueError`` on a size mismatch."""
    p = Path(path)
    meta = read_header(p)
    dtype = meta.get("dtype", "float32")
    if dtype not in _DTYPES:
        raise ValueError(f"{p}: unsupported dtype {dtype!r}")
    shape = tuple(int(n) for n in meta["shape"])
    data = np.frombuffer(p.read_bytes(), dtype=_DTYPES[dtype])
    if data.size != int(np.prod(shape, dtype=np.int64)):
        raise ValueError(f"{p}: {data.size} values on disk, header says {shape}")
    return data.reshape(shape).astype(dtype, copy=True)


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_DIR_ENV, _DEFAULT_CACHE_DIR))


class ArrayCache:
    """File-system cache for derived arrays (log-mel spectrograms).

    Each entry is a pair of files:
        <key>.f32   raw float32 values
        <key>.meta  JSON with shape, dtype and extra header fields

    Usage:
        cache = ArrayCache()                     # $AVTRACE_CACHE_DIR or .avtrace_cache/
        key = cache.cache_key("clip.wav", n_mels=128)
        cache.get(key)                           # np.ndarray | None
        cache.put(key, mel, source="clip.wav")
        cache.size()                             # number of cached arrays
    """

    def __init__(self, cache_dir: Path | None = None) -> None:
        self.cache_dir = cache_dir if cache_dir is not None else default_cache_dir()

    def cache_key(self, source: str, **extra: Any) -> str:
        """Deterministic key from a source identifier + front-end parameters.

        Parameters are part of the key so changing the front-end invalidates
        old entries automatically.
        """
        blob = json.dumps({"source": source, **extra}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def _path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.f32"

    def get(self, key: str) -> np.ndarray | None:
        """Load a cached array, or None if not cached."""
        path = self._path(key)
        if not path.exists() or not sidecar_path(path).exists():
            return None
        try:
            array = read_array(path)
            logger.debug("Cache hit: %s", key)
            return array
        except (json.JSONDecodeError, KeyError, ValueError, OSError) as exc:
            logger.warning("Corrupt cache entry %s, removing: %s", key, exc)
            self._remove_entry(key)
            return None

    def put(self, key: str, array: np.ndarray, **header: Any) -> None:
        write_array(self._path(key), array, **header)
        logger.debug("Cached: %s %s", key, tuple(array.shape))

    def size(self) -> int:
        """Number of cached arrays."""
        if not self.cache_dir.exists():
            return 0
        return sum(1 for f in self.cache_dir.iterdir() if f.suffix == ".f32")

    def _remove_entry(self, key: str) -> None:
        path = self._path(key)
        path.unlink(missing_ok=True)
        sidecar_path(path).unlink(missing_ok=True)
