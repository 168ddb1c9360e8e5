"""Procedural scene synthesis: the stand-in for a web-scale image corpus.

Scenes are hard-edged geometric compositions (no anti-aliasing) over a
textured background; the missing high-frequency content is exactly what
a lossy autoencoder fails to reproduce, which is the signal the detector
trains on. Also provides the two-color geometric test card used by the
artifact analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .image import ImageRGB8, round_half_away

TEXTURES = ("flat", "gradient", "noise-speckle", "stripes")

# desk-scale resolution buckets (min_side, max_side)
DESK_BUCKETS = ((64, 96), (96, 128), (128, 192), (192, 256), (256, 384), (384, 512))
# the eleven ranges listed for the full-scale corpus
PAPER_BUCKETS = (
    (224, 300), (300, 400), (400, 500), (600, 700), (800, 900), (900, 1000),
    (1000, 1500), (1500, 2000), (2000, 2500), (3000, 3500), (4000, 6000),
)


@dataclass(frozen=True)
class ResolutionBucket:
    min_side: int
    max_side: int

    def __post_init__(self):
        if not 1 <= self.min_side <= self.max_side:
            raise ValidationError(f"bad bucket [{self.min_side}, {self.max_side}]")

    @property
    def label(self) -> str:
        return f"{self.min_side}-{self.max_side}"


@dataclass(frozen=True)
class SceneSpec:
    seed: int
    width: int
    height: int
    palette_size: int = 6
    shape_count: int = 5
    texture: str = "flat"

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError("scene dimensions must be >= 1")
        if self.palette_size < 2:
            raise ValidationError(f"palette_size must be >= 2, got {self.palette_size}")
        if self.shape_count < 1:
            raise ValidationError(f"shape_count must be >= 1, got {self.shape_count}")
        if self.texture not in TEXTURES:
            raise ValidationError(f"texture must be one of {TEXTURES}, got {self.texture!r}")


def _paint_shape(img: np.ndarray, rng: np.random.Generator, color: np.ndarray) -> None:
    h, w = img.shape[:2]
    side = min(h, w)
    kind = rng.integers(0, 3)
    if kind == 0:  # rectangle
        rw = int(rng.integers(max(2, side // 8), max(3, side // 2)))
        rh = int(rng.integers(max(2, side // 8), max(3, side // 2)))
        x0 = int(rng.integers(0, max(1, w - rw)))
        y0 = int(rng.integers(0, max(1, h - rh)))
        img[y0:y0 + rh, x0:x0 + rw] = color
    elif kind == 1:  # circle
        r = int(rng.integers(max(2, side // 10), max(3, side // 3)))
        cx = int(rng.integers(0, w))
        cy = int(rng.integers(0, h))
        yy, xx = np.ogrid[:h, :w]
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        img[mask] = color
    else:  # triangle
        pts = np.stack([rng.integers(0, w, 3), rng.integers(0, h, 3)], axis=1)
        yy, xx = np.mgrid[:h, :w]
        def edge(a, b):
            return (xx - a[0]) * (b[1] - a[1]) - (yy - a[1]) * (b[0] - a[0])
        e0 = edge(pts[0], pts[1])
        e1 = edge(pts[1], pts[2])
        e2 = edge(pts[2], pts[0])
        mask = ((e0 >= 0) & (e1 >= 0) & (e2 >= 0)) | ((e0 <= 0) & (e1 <= 0) & (e2 <= 0))
        img[mask] = color


def generate_scene(spec: SceneSpec) -> ImageRGB8:
    """Deterministic textured background plus seeded geometric shapes."""
    rng = np.random.default_rng(spec.seed)
    h, w = spec.height, spec.width
    palette = rng.integers(0, 256, size=(spec.palette_size, 3)).astype(np.uint8)

    img = np.empty((h, w, 3), dtype=np.uint8)
    if spec.texture == "flat":
        img[:] = palette[rng.integers(0, spec.palette_size)]
    elif spec.texture == "gradient":
        c0 = palette[rng.integers(0, spec.palette_size)].astype(np.float64)
        c1 = palette[rng.integers(0, spec.palette_size)].astype(np.float64)
        theta = rng.uniform(0, 2 * np.pi)
        yy, xx = np.mgrid[:h, :w]
        proj = xx * np.cos(theta) + yy * np.sin(theta)
        t = (proj - proj.min()) / max(proj.ptp(), 1e-9)
        img[:] = round_half_away(c0 + (c1 - c0) * t[:, :, None]).astype(np.uint8)
    elif spec.texture == "noise-speckle":
        base = palette[rng.integers(0, spec.palette_size)].astype(np.int64)
        noise = rng.integers(-24, 25, size=(h, w, 3))
        img[:] = np.clip(base + noise, 0, 255).astype(np.uint8)
    else:  # stripes
        c0 = palette[rng.integers(0, spec.palette_size)]
        c1 = palette[rng.integers(0, spec.palette_size)]
        period = int(rng.integers(4, 17))
        orient = rng.integers(0, 3)
        yy, xx = np.mgrid[:h, :w]
        coord = xx if orient == 0 else yy if orient == 1 else xx + yy
        img[:] = c0
        img[(coord // period) % 2 == 1] = c1

    for _ in range(spec.shape_count):
        color = palette[rng.integers(0, spec.palette_size)]
        _paint_shape(img, rng, color)
    return ImageRGB8(img)


def generate_test_card(seed: int, width: int, height: int) -> ImageRGB8:
    """Strictly two-color (pure black on pure white) geometric card."""
    rng = np.random.default_rng(seed)
    img = np.full((height, width, 3), 255, dtype=np.uint8)
    black = np.zeros(3, dtype=np.uint8)
    n_shapes = 6 + (width * height) // 4096
    for _ in range(n_shapes):
        _paint_shape(img, rng, black)
    # a stripe band for dense edges
    period = int(rng.integers(3, 7))
    band_h = max(2, height // 8)
    y0 = int(rng.integers(0, max(1, height - band_h)))
    xx = np.arange(width)
    band = img[y0:y0 + band_h]
    band[:, (xx // period) % 2 == 1] = 0

    # both colors must survive the composition
    if not np.any(np.all(img == 0, axis=2)):
        img[:4, :4] = 0
    if not np.any(np.all(img == 255, axis=2)):
        img[-4:, -4:] = 255
    return ImageRGB8(img)


def sample_resolution(
    buckets: list[ResolutionBucket],
    weights,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """Weighted bucket draw; width uniform in the bucket, aspect in [3:4, 4:3]."""
    if not buckets:
        raise ValidationError("empty bucket list")
    wts = np.asarray(weights, dtype=np.float64)
    if wts.shape != (len(buckets),) or np.any(wts < 0) or wts.sum() == 0:
        raise ValidationError("weights must be non-negative, match buckets, and not all zero")
    idx = int(rng.choice(len(buckets), p=wts / wts.sum()))
    b = buckets[idx]
    width = int(rng.integers(b.min_side, b.max_side + 1))
    aspect = rng.uniform(3 / 4, 4 / 3)
    height = int(round_half_away(np.float64(width / aspect)))
    return width, height
