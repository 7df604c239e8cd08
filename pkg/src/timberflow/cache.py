"""Content-addressed report cache shared by the CLI and the HTTP service.

A rendered report is a pure function of (dataset fingerprint, config), so
the pair's hash is a safe storage key.  The cache lives wherever the
TIMBERFLOW_CACHE environment variable points; without it, caching is off.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .scenario import ScenarioConfig

CACHE_ENV = "TIMBERFLOW_CACHE"


def config_hash(cfg: ScenarioConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def cache_key(fingerprint: str, cfg: ScenarioConfig) -> str:
    return hashlib.sha256(f"{fingerprint}:{config_hash(cfg)}".encode("utf-8")).hexdigest()


def cache_dir() -> Path | None:
    root = os.environ.get(CACHE_ENV)
    return Path(root) if root else None


def cached_report(fingerprint: str, cfg: ScenarioConfig) -> str | None:
    root = cache_dir()
    if root is None:
        return None
    path = root / f"{cache_key(fingerprint, cfg)}.json"
    if path.is_file():
        return path.read_text(encoding="utf-8")
    return None


def store_report(fingerprint: str, cfg: ScenarioConfig, text: str) -> None:
    root = cache_dir()
    if root is None:
        return
    root.mkdir(parents=True, exist_ok=True)
    path = root / f"{cache_key(fingerprint, cfg)}.json"
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)  # atomic on POSIX; readers never see partial writes
