"""Persistent JSON cache for command results.

Entries live one per file under the cache directory, named by the SHA-256 of
the canonical JSON of their inputs. A single lock file serializes writers;
readers take a shared lock so they never see a half-written entry.
"""

from __future__ import annotations

import contextlib
import fcntl
import hashlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .errors import CorruptCacheEntry


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def cache_key(inputs: dict) -> str:
    return hashlib.sha256(canonical_json(inputs).encode()).hexdigest()


def default_cache_dir() -> Path:
    env = os.environ.get("ARTIFACT_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "artifact"


class Cache:
    """Transparent memoization of JSON payloads keyed by canonical input hashes."""

    def __init__(self, directory: Optional[os.PathLike] = None, version: str = __version__,
                 enabled: bool = True):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.version = version
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    @contextlib.contextmanager
    def _lock(self, exclusive: bool):
        self.directory.mkdir(parents=True, exist_ok=True)
        with open(self.directory / ".lock", "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX if exclusive else fcntl.LOCK_SH)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def read(self, key: str):
        """The stored payload, None when absent or from another version.

        Raises CorruptCacheEntry when the file exists but cannot be parsed or
        does not describe the requested key.
        """
        path = self._path(key)
        with self._lock(exclusive=False):
            if not path.exists():
                return None
            raw = path.read_text(encoding="utf-8")
        try:
            entry = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorruptCacheEntry(f"{path}: {exc}") from exc
        if not isinstance(entry, dict) or entry.get("key") != key or "payload" not in entry:
            raise CorruptCacheEntry(f"{path}: malformed entry")
        if entry.get("version") != self.version:
            return None
        return entry["payload"]

    def write(self, key: str, payload) -> None:
        entry = {"key": key, "version": self.version, "created": time.time(), "payload": payload}
        path = self._path(key)
        with self._lock(exclusive=True):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(canonical_json(entry), encoding="utf-8")
            os.replace(tmp, path)

    def get_or_compute(self, inputs: dict, producer: Callable[[], object]):
        """The payload for ``inputs``, computing and storing it on a miss.

        Payloads are round-tripped through JSON before being returned so a hit
        and a fresh computation yield identical documents.
        """
        if not self.enabled:
            return json.loads(canonical_json(producer()))
        key = cache_key({"inputs": inputs, "version": self.version})
        try:
            payload = self.read(key)
        except CorruptCacheEntry as exc:
            print(f"warning: corrupt cache entry, recomputing ({exc})", file=sys.stderr)
            payload = None
        if payload is not None:
            self.hits += 1
            return payload
        self.misses += 1
        payload = json.loads(canonical_json(producer()))
        self.write(key, payload)
        return payload
