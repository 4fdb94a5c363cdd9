from .backend import (
    UNIT_NORM_TOL,
    BackendSpec,
    EmbeddingBackend,
    check_unit_vector,
    load_backend,
    unit_normalize,
)
from .modelgen import build_demo_model
from .preprocess import get_pipeline, hash_tokenize, registered_pipelines
from .stub import StubBackend

__all__ = [
    "UNIT_NORM_TOL",
    "BackendSpec",
    "EmbeddingBackend",
    "StubBackend",
    "build_demo_model",
    "check_unit_vector",
    "get_pipeline",
    "hash_tokenize",
    "load_backend",
    "registered_pipelines",
    "unit_normalize",
]
