"""Backend contract for joint image/text encoders.

Every vector leaving a backend is float32, length ``dim``, and
unit-normalized within 1e-5. Backends are safe for concurrent encode
calls; implementations serialize access to non-reentrant runtimes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import BackendError

UNIT_NORM_TOL = 1e-5


@dataclass(frozen=True)
class BackendSpec:
    """Declared model metadata; `load_backend` verifies it against the file."""

    model_path: str
    dim: int
    input_resolution: int
    preprocessing: str = "clip_rgb"
    text_vocab: int = 4096
    text_context: int = 32
    text_overflow: str = "truncate"  # or "error"

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.input_resolution <= 0:
            raise ValueError(f"input_resolution must be positive, got {self.input_resolution}")


def unit_normalize(vec: np.ndarray) -> np.ndarray:
    """Scale to unit L2 norm, returning float32. Rejects zero/non-finite input."""
    arr = np.asarray(vec, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise BackendError("backend produced non-finite embedding components")
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise BackendError("backend produced a zero embedding vector")
    return (arr / norm).astype(np.float32)


def check_unit_vector(vec: np.ndarray, dim: int) -> None:
    if vec.shape != (dim,):
        raise ValueError(f"expected vector of length {dim}, got shape {vec.shape}")
    norm = float(np.linalg.norm(np.asarray(vec, dtype=np.float64)))
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"vector is not unit-normalized (|v| = {norm})")


class EmbeddingBackend:
    """Base class: subclasses implement the raw single-item encode hooks."""

    dim: int
    fingerprint: str
    supports_images: bool = True
    supports_text: bool = True

    def encode_image(self, image: np.ndarray) -> np.ndarray:
        """Encode one HxWx3 uint8 RGB bitmap into a unit vector."""
        if not self.supports_images:
            raise BackendError(f"backend {self.fingerprint} does not support images")
        image = np.asarray(image)
        if image.size == 0:
            raise ValueError("zero-size image")
        return self._encode_image(image)

    def encode_text(self, text: str) -> np.ndarray:
        """Encode a text string into a unit vector."""
        if not self.supports_text:
            raise BackendError(f"backend {self.fingerprint} does not support text")
        if not text or not text.strip():
            raise ValueError("empty text")
        return self._encode_text(text)

    def encode_image_batch(self, images: list[np.ndarray]) -> np.ndarray:
        """Encode images in order; result[i] matches encode_image(images[i]).

        The first failing image aborts the batch with its index named.
        """
        out = np.zeros((len(images), self.dim), dtype=np.float32)
        for i, image in enumerate(images):
            try:
                out[i] = self.encode_image(image)
            except (ValueError, BackendError) as exc:
                raise BackendError(f"image at index {i} failed to encode: {exc}") from exc
        return out

    def _encode_image(self, image: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _encode_text(self, text: str) -> np.ndarray:
        raise NotImplementedError


def load_backend(spec: BackendSpec) -> EmbeddingBackend:
    """Load the TorchScript backend described by ``spec``.

    Raises FileNotFoundError for a missing model file and BackendError when
    the model's output dimension contradicts ``spec.dim``.
    """
    from .torchscript import TorchScriptBackend

    if not Path(spec.model_path).is_file():
        raise FileNotFoundError(f"model file not found: {spec.model_path}")
    return TorchScriptBackend(spec)
