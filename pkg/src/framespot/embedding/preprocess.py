"""Registered preprocessing pipelines for the embedding backends.

Scores are only comparable when produced under identical preprocessing,
so pipelines are named, versioned, and recorded in backend fingerprints.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass

import numpy as np
from PIL import Image

log = logging.getLogger(__name__)

# Channel statistics commonly used by joint image/text encoders.
_CLIP_MEAN = (0.48145466, 0.4578275, 0.40821073)
_CLIP_STD = (0.26862954, 0.26130258, 0.27577711)


@dataclass(frozen=True)
class ImagePipeline:
    """Deterministic bitmap -> model-input tensor conversion."""

    name: str
    mean: tuple[float, float, float]
    std: tuple[float, float, float]
    resize_policy: str  # "shorter_side_crop" | "stretch"

    def __call__(self, image: np.ndarray, resolution: int) -> np.ndarray:
        """Convert an HxWx3 uint8 RGB bitmap to a CHW float32 tensor."""
        if image.ndim != 3 or image.shape[2] != 3:
            raise ValueError(f"expected HxWx3 RGB image, got shape {image.shape}")
        if image.shape[0] == 0 or image.shape[1] == 0:
            raise ValueError("zero-size image")
        pil = Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8))
        if self.resize_policy == "shorter_side_crop":
            w, h = pil.size
            scale = resolution / min(w, h)
            nw, nh = max(resolution, round(w * scale)), max(resolution, round(h * scale))
            pil = pil.resize((nw, nh), Image.BICUBIC)
            left = (nw - resolution) // 2
            top = (nh - resolution) // 2
            pil = pil.crop((left, top, left + resolution, top + resolution))
        elif self.resize_policy == "stretch":
            pil = pil.resize((resolution, resolution), Image.BICUBIC)
        else:
            raise ValueError(f"unknown resize policy: {self.resize_policy}")
        arr = np.asarray(pil, dtype=np.float32) / 255.0
        arr = (arr - np.array(self.mean, dtype=np.float32)) / np.array(self.std, dtype=np.float32)
        return arr.transpose(2, 0, 1).copy()


_PIPELINES: dict[str, ImagePipeline] = {
    "clip_rgb": ImagePipeline("clip_rgb", _CLIP_MEAN, _CLIP_STD, "shorter_side_crop"),
    "plain_rgb": ImagePipeline("plain_rgb", (0.5, 0.5, 0.5), (0.5, 0.5, 0.5), "stretch"),
}


def get_pipeline(name: str) -> ImagePipeline:
    try:
        return _PIPELINES[name]
    except KeyError:
        raise ValueError(
            f"unregistered preprocessing pipeline: {name!r} (known: {sorted(_PIPELINES)})"
        ) from None


def registered_pipelines() -> list[str]:
    return sorted(_PIPELINES)


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def hash_tokenize(
    text: str,
    vocab_size: int,
    context_length: int,
    overflow: str = "truncate",
) -> np.ndarray:
    """Tokenize text into fixed-length int64 ids via stable hashing.

    Id 0 is padding; real tokens hash into [1, vocab_size). Texts longer
    than the context either truncate (with a warning) or raise, per
    ``overflow``.
    """
    if not text.strip():
        raise ValueError("empty text")
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        raise ValueError(f"text contains no tokens: {text!r}")
    if len(tokens) > context_length:
        if overflow == "error":
            raise ValueError(
                f"text exceeds context length ({len(tokens)} > {context_length} tokens)"
            )
        log.warning("text truncated to %d tokens: %r", context_length, text)
        tokens = tokens[:context_length]
    ids = np.zeros(context_length, dtype=np.int64)
    for i, tok in enumerate(tokens):
        digest = hashlib.sha1(tok.encode("utf-8")).digest()
        ids[i] = 1 + int.from_bytes(digest[:8], "big") % (vocab_size - 1)
    return ids
