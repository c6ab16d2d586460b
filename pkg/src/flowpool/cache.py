"""Content-addressed cache of computed flow fields.

A cache entry is one `.flo` file named by the SHA-256 of everything that
determines the flow: the dimensions and raw pixels of both frames plus the
estimator parameters. Since the estimator is deterministic, a hit can be
substituted for a recomputation without changing any downstream byte.

Writes go to a temporary file first and are renamed into place, so
concurrent jobs sharing one cache directory never observe half-written
entries; at worst two jobs compute the same field and one rename wins.
"""

from __future__ import annotations

import hashlib
import os
import uuid
from pathlib import Path

from .errors import BadMagicError, TruncatedFileError
from .frame_io import FlowField, Frame, read_flo, write_flo
from .optical_flow import FlowParams

_KEY_VERSION = b"flowpool-flow-v1"


def flow_cache_key(prev: Frame, next: Frame, params: FlowParams) -> str:
    """Hex digest identifying one (frame pair, params) flow computation."""
    digest = hashlib.sha256()
    digest.update(_KEY_VERSION)
    digest.update(f"{prev.width}x{prev.height}".encode())
    digest.update(prev.pixels.tobytes())
    digest.update(next.pixels.tobytes())
    digest.update(
        f"{params.smoothness!r}|{params.iterations}|{params.levels}".encode()
    )
    return digest.hexdigest()


class FlowCache:
    """Directory of `.flo` files keyed by content hash."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.flo"

    def get(self, key: str) -> FlowField | None:
        """Cached field for the key, or None on a miss or unreadable entry."""
        path = self._path(key)
        if not path.is_file():
            return None
        try:
            return read_flo(path)
        except (BadMagicError, TruncatedFileError, OSError):
            return None  # damaged entry: fall back to recomputing

    def put(self, key: str, field: FlowField) -> None:
        """Store a field under the key, atomically replacing any old entry."""
        tmp = self.root / f".tmp-{uuid.uuid4().hex}"
        try:
            write_flo(field, tmp)
            os.replace(tmp, self._path(key))
        finally:
            if tmp.exists():
                tmp.unlink()
