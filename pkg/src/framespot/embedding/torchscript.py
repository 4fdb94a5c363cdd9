"""TorchScript runtime backend.

Loads a single-file TorchScript export exposing ``forward(images)`` for
the image tower and an exported ``encode_text(token_ids)`` for the text
tower (absent for image-only models). Inference runs on CPU; calls are
serialized with a lock so a loaded backend is shareable across threads.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path

import numpy as np

from ..errors import BackendError
from .backend import BackendSpec, EmbeddingBackend, unit_normalize
from .preprocess import get_pipeline, hash_tokenize


def _file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class TorchScriptBackend(EmbeddingBackend):
    def __init__(self, spec: BackendSpec):
        import torch

        self._torch = torch
        self.spec = spec
        self._pipeline = get_pipeline(spec.preprocessing)
        self._lock = threading.Lock()

        path = Path(spec.model_path)
        if not path.is_file():
            raise FileNotFoundError(f"model file not found: {path}")
        try:
            self._model = torch.jit.load(str(path), map_location="cpu")
        except Exception as exc:
            raise BackendError(f"failed to load TorchScript model {path}: {exc}") from exc
        self._model.eval()

        self.dim = spec.dim
        self.fingerprint = (
            f"torchscript:{_file_sha256(spec.model_path)[:12]}"
            f":{spec.preprocessing}:{spec.input_resolution}"
        )
        self._verify_dim()
        self.supports_text = hasattr(self._model, "encode_text")

    def _verify_dim(self) -> None:
        probe = self._torch.zeros(1, 3, self.spec.input_resolution, self.spec.input_resolution)
        with self._torch.no_grad():
            out = self._model(probe)
        actual = int(out.shape[-1])
        if actual != self.spec.dim:
            raise BackendError(
                f"dimension mismatch: spec declares dim={self.spec.dim} "
                f"but model emits {actual}"
            )

    def _forward_images(self, batch: np.ndarray) -> np.ndarray:
        tensor = self._torch.from_numpy(batch)
        with self._lock, self._torch.no_grad():
            out = self._model(tensor)
        return out.numpy()

    def _encode_image(self, image: np.ndarray) -> np.ndarray:
        chw = self._pipeline(image, self.spec.input_resolution)
        raw = self._forward_images(chw[None])
        return unit_normalize(raw[0])

    def encode_image_batch(self, images: list[np.ndarray]) -> np.ndarray:
        if not images:
            return np.zeros((0, self.dim), dtype=np.float32)
        batch = np.zeros(
            (len(images), 3, self.spec.input_resolution, self.spec.input_resolution),
            dtype=np.float32,
        )
        for i, image in enumerate(images):
            try:
                image = np.asarray(image)
                if image.size == 0:
                    raise ValueError("zero-size image")
                batch[i] = self._pipeline(image, self.spec.input_resolution)
            except (ValueError, BackendError) as exc:
                raise BackendError(f"image at index {i} failed to encode: {exc}") from exc
        raw = self._forward_images(batch)
        out = np.zeros((len(images), self.dim), dtype=np.float32)
        for i in range(len(images)):
            out[i] = unit_normalize(raw[i])
        return out

    def _encode_text(self, text: str) -> np.ndarray:
        ids = hash_tokenize(
            text,
            vocab_size=self.spec.text_vocab,
            context_length=self.spec.text_context,
            overflow=self.spec.text_overflow,
        )
        tensor = self._torch.from_numpy(ids[None])
        try:
            with self._lock, self._torch.no_grad():
                raw = self._model.encode_text(tensor)
        except RuntimeError as exc:
            raise BackendError(f"text inference failed: {exc}") from exc
        return unit_normalize(raw.numpy()[0])
