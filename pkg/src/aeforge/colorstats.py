"""Color-statistics primitives for the artifact analysis."""

from __future__ import annotations

import logging

import numpy as np

from .image import ImageRGB8

log = logging.getLogger(__name__)


def _packed(image: ImageRGB8) -> np.ndarray:
    p = image.pixels.astype(np.uint32)
    return (p[:, :, 0] << 16) | (p[:, :, 1] << 8) | p[:, :, 2]


def unique_colors(image: ImageRGB8) -> int:
    """Count of distinct (r, g, b) triples."""
    return int(np.unique(_packed(image)).size)


def bw_fraction(image: ImageRGB8) -> float:
    """Fraction of pixels that are exactly pure black or pure white."""
    p = image.pixels
    black = np.all(p == 0, axis=2)
    white = np.all(p == 255, axis=2)
    return float(np.mean(black | white))


def color_randomize(image: ImageRGB8, seed: int) -> ImageRGB8:
    """Replace each unique color with a distinct seeded random color.

    The map is a bijection on the image's palette, so unique_colors and
    pixel equality structure are preserved. Palettes too large for
    distinct 24-bit targets fall back to allowing collisions.
    """
    packed = _packed(image)
    uniq = np.unique(packed)
    rng = np.random.default_rng(seed)
    n = uniq.size
    if n > 2 ** 24:
        log.warning("palette of %d colors cannot map to distinct 24-bit colors; allowing collisions", n)
        new = rng.integers(0, 2 ** 24, size=n, dtype=np.uint32)
    else:
        taken = set()
        picked = []
        while len(picked) < n:
            batch = rng.integers(0, 2 ** 24, size=max(64, n - len(picked)), dtype=np.uint32)
            for v in batch:
                if v not in taken:
                    taken.add(int(v))
                    picked.append(int(v))
                    if len(picked) == n:
                        break
        new = np.array(picked, dtype=np.uint32)

    idx = np.searchsorted(uniq, packed)
    mapped = new[idx]
    out = np.empty_like(image.pixels)
    out[:, :, 0] = (mapped >> 16) & 0xFF
    out[:, :, 1] = (mapped >> 8) & 0xFF
    out[:, :, 2] = mapped & 0xFF
    return ImageRGB8(out)
