"""Purpose-keyed seed derivation: one root seed fans out to every stage."""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *purpose: str | int) -> int:
    """Stable 63-bit child seed for (root, purpose...)."""
    key = ":".join([str(root), *map(str, purpose)])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
