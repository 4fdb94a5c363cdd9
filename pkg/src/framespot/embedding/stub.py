"""Deterministic hash-based backend.

Embeds the SHA-256 of the input bytes through a seeded Gaussian draw, so
identical inputs map to identical unit vectors and distinct inputs are
near-orthogonal in high dimensions. No model file required; useful for
plumbing runs and CI where a real encoder is unnecessary.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .backend import EmbeddingBackend, unit_normalize


class StubBackend(EmbeddingBackend):
    def __init__(self, dim: int = 64):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = dim
        self.fingerprint = f"stub:{dim}:v1"

    def _vector_for(self, payload: bytes) -> np.ndarray:
        digest = hashlib.sha256(payload).digest()
        seed = int.from_bytes(digest[:8], "big")
        rng = np.random.default_rng(seed)
        return unit_normalize(rng.standard_normal(self.dim))

    def _encode_image(self, image: np.ndarray) -> np.ndarray:
        arr = np.ascontiguousarray(image)
        return self._vector_for(b"img:" + repr(arr.shape).encode() + arr.tobytes())

    def _encode_text(self, text: str) -> np.ndarray:
        return self._vector_for(b"txt:" + text.strip().lower().encode("utf-8"))
