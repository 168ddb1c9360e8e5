"""Stable seed derivation shared by datagen and inference."""

import hashlib


def stable_seed(*parts) -> int:
    """63-bit seed from a tuple of values, stable across runs and platforms."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1
