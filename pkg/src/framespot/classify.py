"""Zero-shot activity classification.

Frame embeddings are mean-pooled into one video vector and compared
against each label's text embedding by cosine similarity; the top-ranked
label is the predicted primary activity.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .embedding.backend import EmbeddingBackend
from .score import FrameEmbeddingSeries


@dataclass
class ActivityLabelSet:
    labels: list[str]
    label_embeddings: np.ndarray  # (L, D) float32, rows unit-norm
    backend_fingerprint: str
    prompt_template: str = "{label}"

    def __post_init__(self):
        if not self.labels:
            raise ValueError("label set is empty")
        if len(set(self.labels)) != len(self.labels):
            dupes = sorted({l for l in self.labels if self.labels.count(l) > 1})
            raise ValueError(f"duplicate labels: {dupes[:5]}")
        self.label_embeddings = np.asarray(self.label_embeddings, dtype=np.float32)
        if self.label_embeddings.shape[0] != len(self.labels):
            raise ValueError("one embedding required per label")

    @classmethod
    def build(
        cls,
        labels: list[str],
        backend: EmbeddingBackend,
        prompt_template: str = "{label}",
    ) -> "ActivityLabelSet":
        """Encode each label through the text tower using the template verbatim."""
        embeddings = np.zeros((len(labels), backend.dim), dtype=np.float32)
        for i, label in enumerate(labels):
            embeddings[i] = backend.encode_text(prompt_template.format(label=label))
        return cls(
            labels=list(labels),
            label_embeddings=embeddings,
            backend_fingerprint=backend.fingerprint,
            prompt_template=prompt_template,
        )


def load_labels(path: str | Path | None = None) -> list[str]:
    """Read a label database: UTF-8 text, one label per line, # comments."""
    if path is None:
        text = resources.files("framespot.data").joinpath("labels.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    labels = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            labels.append(line)
    if not labels:
        raise ValueError(f"label database is empty: {path}")
    return labels


def classify_activity(
    frames: FrameEmbeddingSeries,
    labels: ActivityLabelSet,
    top_k: int = 5,
) -> list[tuple[str, float]]:
    """Rank labels by cosine similarity to the mean-pooled frame embedding.

    Ties break by label lexicographic order; returns min(top_k, L) pairs.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    if labels.backend_fingerprint != frames.backend_fingerprint:
        raise ValueError(
            "backend fingerprint mismatch: labels "
            f"{labels.backend_fingerprint!r} vs frames {frames.backend_fingerprint!r}"
        )
    mean = frames.embeddings.astype(np.float64).mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0:
        raise ValueError("mean frame embedding is zero; cannot rank labels")
    scores = labels.label_embeddings.astype(np.float64) @ (mean / norm)
    order = sorted(range(len(labels.labels)), key=lambda i: (-scores[i], labels.labels[i]))
    return [(labels.labels[i], float(scores[i])) for i in order[:top_k]]
