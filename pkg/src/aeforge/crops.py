"""Seeded random square crops."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .image import ImageRGB8


@dataclass(frozen=True)
class CropSpec:
    size: int
    count: int
    rng_seed: int

    def __post_init__(self):
        if self.size < 1:
            raise ValidationError(f"crop size must be >= 1, got {self.size}")
        if self.count < 1:
            raise ValidationError(f"crop count must be >= 1, got {self.count}")


def crop_corners(width: int, height: int, spec: CropSpec) -> list[tuple[int, int]]:
    """Uniform (x, y) top-left corners; x drawn first, then y."""
    if width < spec.size or height < spec.size:
        raise ValidationError(
            f"image {width}x{height} smaller than crop size {spec.size}"
        )
    rng = np.random.default_rng(spec.rng_seed)
    xs = rng.integers(0, width - spec.size + 1, size=spec.count)
    ys = rng.integers(0, height - spec.size + 1, size=spec.count)
    return [(int(x), int(y)) for x, y in zip(xs, ys)]


def random_crops(image: ImageRGB8, spec: CropSpec) -> list[ImageRGB8]:
    corners = crop_corners(image.width, image.height, spec)
    s = spec.size
    return [
        ImageRGB8(image.pixels[y:y + s, x:x + s].copy()) for x, y in corners
    ]
