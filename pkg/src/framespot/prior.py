"""Exemplar-photo priors.

A prior is the arithmetic mean of the unit-normalized embeddings of a
small set of exemplar photographs (ten by default). The mean is kept
un-renormalized: rescaling it by a positive constant only rescales raw
frame scores, which min-max normalization cancels downstream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from PIL import Image

from .embedding.backend import UNIT_NORM_TOL, EmbeddingBackend
from .errors import BackendError, ProviderError

log = logging.getLogger(__name__)

DEFAULT_PHOTO_COUNT = 10
PRIOR_SCHEMA_VERSION = 1
MEAN_TOL = 1e-6

_IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".webp", ".gif", ".tif", ".tiff"}


@dataclass
class PriorProfile:
    keyword: str  # may be empty for purely personal priors
    photo_refs: list[str]
    photo_embeddings: np.ndarray  # (N, D) float32, rows unit-norm
    mean_embedding: np.ndarray  # (D,) float32, NOT renormalized
    backend_fingerprint: str
    created_at: str = ""
    schema_version: int = PRIOR_SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.photo_embeddings = np.asarray(self.photo_embeddings, dtype=np.float32)
        self.mean_embedding = np.asarray(self.mean_embedding, dtype=np.float32)
        if self.photo_embeddings.ndim != 2 or self.photo_embeddings.shape[0] == 0:
            raise ValueError("photo_embeddings must be a non-empty (N, D) array")
        norms = np.linalg.norm(self.photo_embeddings.astype(np.float64), axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            raise ValueError("photo embeddings must be unit-normalized")
        expected = self.photo_embeddings.astype(np.float64).mean(axis=0)
        if np.max(np.abs(expected - self.mean_embedding.astype(np.float64))) > MEAN_TOL:
            raise ValueError("mean_embedding is not the mean of photo_embeddings")
        if not self.created_at:
            self.created_at = datetime.now(timezone.utc).isoformat()

    @property
    def dim(self) -> int:
        return self.photo_embeddings.shape[1]

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "keyword": self.keyword,
            "photo_refs": list(self.photo_refs),
            "photo_embeddings": [[float(x) for x in row] for row in self.photo_embeddings],
            "mean_embedding": [float(x) for x in self.mean_embedding],
            "backend_fingerprint": self.backend_fingerprint,
            "created_at": self.created_at,
            "extra": self.extra,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PriorProfile":
        version = data.get("schema_version", 0)
        if version > PRIOR_SCHEMA_VERSION:
            raise ValueError(f"prior schema version {version} not supported")
        return cls(
            keyword=data.get("keyword", ""),
            photo_refs=list(data.get("photo_refs", [])),
            photo_embeddings=np.asarray(data["photo_embeddings"], dtype=np.float32),
            mean_embedding=np.asarray(data["mean_embedding"], dtype=np.float32),
            backend_fingerprint=data.get("backend_fingerprint", ""),
            created_at=data.get("created_at", ""),
            schema_version=version,
            extra=data.get("extra", {}),
        )


def _load_image(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


class PhotoProvider:
    """Source of exemplar photographs for a keyword."""

    def fetch(self, keyword: str, n: int) -> list[tuple[np.ndarray, str]]:
        """Return up to n (image, source_ref) pairs in ranking order."""
        raise NotImplementedError

    def fingerprint(self) -> str:
        raise NotImplementedError


class LocalFolderProvider(PhotoProvider):
    """Serves photos from a folder, ordered by filename.

    If the folder has a subdirectory matching the keyword (spaces mapped
    to underscores), that subdirectory is used; otherwise the folder
    itself is treated as the photo set for any keyword.
    """

    def __init__(self, folder: str):
        self.folder = Path(folder)
        if not self.folder.is_dir():
            raise ProviderError(f"photo folder not found: {folder}")

    def _folder_for(self, keyword: str) -> Path:
        if keyword:
            sub = self.folder / keyword.strip().lower().replace(" ", "_")
            if sub.is_dir():
                return sub
        return self.folder

    def fetch(self, keyword: str, n: int) -> list[tuple[np.ndarray, str]]:
        folder = self._folder_for(keyword)
        paths = sorted(
            p for p in folder.iterdir()
            if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
        )
        results = []
        for p in paths[:n]:
            try:
                results.append((_load_image(p), str(p)))
            except OSError as exc:
                raise ProviderError(f"cannot decode photo {p}: {exc}") from exc
        return results

    def fingerprint(self) -> str:
        return f"local:{self.folder.resolve()}"


class HttpSearchProvider(PhotoProvider):
    """Searches a JSON HTTP API and downloads the returned image URLs.

    The endpoint is expected to accept GET <endpoint>?<query_param>=kw&
    <limit_param>=n and answer with a JSON object holding a list of
    results under ``results_key``; each item carries the image URL under
    ``url_key``. Results are used in endpoint order unless
    ``ranking_key`` names a field to sort by (descending).
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        query_param: str = "query",
        limit_param: str = "limit",
        results_key: str = "results",
        url_key: str = "url",
        ranking_key: str | None = None,
        timeout: float = 30.0,
    ):
        self.endpoint = endpoint
        self.api_key = api_key
        self.query_param = query_param
        self.limit_param = limit_param
        self.results_key = results_key
        self.url_key = url_key
        self.ranking_key = ranking_key
        self.timeout = timeout

    def fetch(self, keyword: str, n: int) -> list[tuple[np.ndarray, str]]:
        import io

        import requests

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = requests.get(
                self.endpoint,
                params={self.query_param: keyword, self.limit_param: n},
                headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise ProviderError(f"photo search failed against {self.endpoint}: {exc}") from exc
        items = payload.get(self.results_key, [])
        if self.ranking_key:
            items = sorted(items, key=lambda it: it.get(self.ranking_key, 0), reverse=True)
        results = []
        for item in items[:n]:
            url = item.get(self.url_key)
            if not url:
                continue
            try:
                img_resp = requests.get(url, headers=headers, timeout=self.timeout)
                img_resp.raise_for_status()
                with Image.open(io.BytesIO(img_resp.content)) as img:
                    results.append((np.asarray(img.convert("RGB")), url))
            except (requests.RequestException, OSError) as exc:
                raise ProviderError(f"cannot download photo {url}: {exc}") from exc
        return results

    def fingerprint(self) -> str:
        return f"http:{self.endpoint}"


def fetch_photos(
    keyword: str, provider: PhotoProvider, n: int = DEFAULT_PHOTO_COUNT
) -> list[tuple[np.ndarray, str]]:
    """Fetch up to n exemplar photos; a shortfall warns, zero results raise."""
    if n < 1:
        raise ValueError(f"photo count must be >= 1, got {n}")
    results = provider.fetch(keyword, n)
    if not results:
        raise ProviderError(
            f"provider {provider.fingerprint()} returned no photos for {keyword!r}"
        )
    if len(results) < n:
        log.warning(
            "only %d of %d requested photos available for %r", len(results), n, keyword
        )
    return results


def build_prior_from_images(
    images: list[np.ndarray],
    keyword: str,
    backend: EmbeddingBackend,
    refs: list[str] | None = None,
) -> PriorProfile:
    """Encode exemplar images and average their embeddings (no renorm)."""
    if not images:
        raise ValueError("at least one exemplar image is required")
    refs = refs if refs is not None else [f"image[{i}]" for i in range(len(images))]
    embeddings = np.zeros((len(images), backend.dim), dtype=np.float32)
    for i, image in enumerate(images):
        try:
            embeddings[i] = backend.encode_image(image)
        except (ValueError, BackendError) as exc:
            raise BackendError(f"exemplar photo {refs[i]} failed to encode: {exc}") from exc
    mean = embeddings.astype(np.float64).mean(axis=0).astype(np.float32)
    return PriorProfile(
        keyword=keyword,
        photo_refs=list(refs),
        photo_embeddings=embeddings,
        mean_embedding=mean,
        backend_fingerprint=backend.fingerprint,
    )


def build_prior(
    keyword: str,
    provider: PhotoProvider,
    backend: EmbeddingBackend,
    n: int = DEFAULT_PHOTO_COUNT,
) -> PriorProfile:
    """Fetch exemplar photos for a keyword and build the averaged prior."""
    fetched = fetch_photos(keyword, provider, n)
    images = [img for img, _ in fetched]
    refs = [ref for _, ref in fetched]
    profile = build_prior_from_images(images, keyword, backend, refs=refs)
    profile.extra["provider_fingerprint"] = provider.fingerprint()
    return profile
