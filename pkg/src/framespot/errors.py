"""Exception types shared across the package.

Precondition violations on plain values (bad windows, empty inputs,
invalid intervals) raise ValueError; these classes cover failures of
external things: model files, decoder processes, photo providers, and
persisted project state.
"""


class FramespotError(Exception):
    """Base class for framespot-specific failures."""


class BackendError(FramespotError):
    """Embedding model could not be loaded or failed during inference."""


class MediaError(FramespotError):
    """Video probe, decode, or encode failure from the external decoder."""

    def __init__(self, message: str, last_good_timestamp: float | None = None):
        super().__init__(message)
        self.last_good_timestamp = last_good_timestamp


class ProviderError(FramespotError):
    """Photo provider unreachable or returned no usable results."""


class StoreError(FramespotError):
    """Project persistence problem: schema, dangling reference, or I/O."""
