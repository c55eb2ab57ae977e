"""Checkpoints, JSON artifacts, and run-level memoization.

Checkpoint format (npz, version tag ``qglab-checkpoint-1``): JSON-encoded
config string, one complex coefficient array per stored field, and the
snapshot time.  QG checkpoints carry ``form`` = ``pv`` or ``projected``;
Boussinesq checkpoints carry ``form`` = ``boussinesq``.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

CHECKPOINT_VERSION = "qglab-checkpoint-1"

__all__ = [
    "save_checkpoint",
    "load_checkpoint",
    "write_json",
    "read_json",
    "config_hash",
    "RunCache",
]


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path, payload: dict) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    os.replace(tmp, path)


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=_jsonable).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def save_checkpoint(path, form: str, config: dict, arrays: dict, time: float) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    np.savez_compressed(
        tmp,
        version=CHECKPOINT_VERSION,
        form=form,
        config=json.dumps(config, sort_keys=True, default=_jsonable),
        time=float(time),
        **arrays,
    )
    os.replace(str(tmp) + ".npz" if not str(tmp).endswith(".npz") else tmp, path)


def load_checkpoint(path) -> dict:
    with np.load(path, allow_pickle=False) as z:
        version = str(z["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version!r}")
        out = {
            "form": str(z["form"]),
            "config": json.loads(str(z["config"])),
            "time": float(z["time"]),
        }
        for key in z.files:
            if key not in ("version", "form", "config", "time"):
                out[key] = z[key]
    return out


class RunCache:
    """Per-run memoization: finished sweep members are skipped on resume.

    A member is identified by a name plus the hash of everything that can
    affect its records.  A completed member owns ``<name>.csv`` (its record
    rows) and ``<name>.done.json`` (its scalar results); reruns with the
    same hash reuse both, so an interrupted sweep resumes without changing
    any output byte.
    """

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    def _paths(self, name: str):
        return self.dir / f"{name}.csv", self.dir / f"{name}.done.json"

    def get(self, name: str, key_config: dict):
        csv_path, done_path = self._paths(name)
        if not done_path.exists():
            return None
        payload = read_json(done_path)
        if payload.get("key") != config_hash(key_config):
            return None
        return payload["result"]

    def put(self, name: str, key_config: dict, result: dict, csv_text: str | None = None) -> None:
        csv_path, done_path = self._paths(name)
        if csv_text is not None:
            tmp = csv_path.with_suffix(".tmp")
            tmp.write_text(csv_text)
            os.replace(tmp, csv_path)
        write_json(done_path, {"key": config_hash(key_config), "result": result})

    def csv_text(self, name: str) -> str | None:
        csv_path, _ = self._paths(name)
        return csv_path.read_text() if csv_path.exists() else None
