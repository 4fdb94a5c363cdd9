"""Runtime configuration for the CLI and the local service.

Precedence: built-in defaults < JSON config file < environment variables
< explicit constructor arguments. Environment variables use the
FRAMESPOT_ prefix (FRAMESPOT_MODEL, FRAMESPOT_FFMPEG, ...).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

_ENV_KEYS = {
    "model_path": "FRAMESPOT_MODEL",
    "decoder_path": "FRAMESPOT_FFMPEG",
    "labels_path": "FRAMESPOT_LABELS",
    "project_dir": "FRAMESPOT_PROJECT_DIR",
    "photo_root": "FRAMESPOT_PHOTO_ROOT",
    "port": "FRAMESPOT_PORT",
    "host": "FRAMESPOT_HOST",
    "backend": "FRAMESPOT_BACKEND",
    "ui_dir": "FRAMESPOT_UI_DIR",
}

_INT_FIELDS = {"port", "dim", "input_resolution", "photos_per_prior"}
_FLOAT_FIELDS = {"sampling_rate"}


@dataclass
class AppConfig:
    model_path: str | None = None
    backend: str = "torchscript"  # torchscript | stub
    dim: int = 128
    input_resolution: int = 64
    preprocessing: str = "clip_rgb"
    decoder_path: str | None = None
    labels_path: str | None = None
    project_dir: str = "./framespot-projects"
    photo_root: str | None = None
    photos_per_prior: int = 10
    sampling_rate: float = 1.0
    host: str = "127.0.0.1"
    port: int = 8799
    ui_dir: str | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def load(cls, config_file: str | os.PathLike | None = None, **overrides) -> "AppConfig":
        values: dict = {}
        if config_file is not None:
            path = Path(config_file)
            if not path.is_file():
                raise FileNotFoundError(f"config file not found: {path}")
            data = json.loads(path.read_text())
            if not isinstance(data, dict):
                raise ValueError(f"config file must hold a JSON object: {path}")
            values.update(data)
        for name, env in _ENV_KEYS.items():
            raw = os.environ.get(env)
            if raw:
                values[name] = raw
        values.update({k: v for k, v in overrides.items() if v is not None})

        known = {f.name for f in fields(cls)}
        extra = {k: values.pop(k) for k in list(values) if k not in known}
        for name in _INT_FIELDS & values.keys():
            values[name] = int(values[name])
        for name in _FLOAT_FIELDS & values.keys():
            values[name] = float(values[name])
        cfg = cls(**values)
        cfg.extra.update(extra)
        return cfg
