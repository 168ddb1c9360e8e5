"""JPEG-style degradation: 8x8 DCT quantization without entropy coding.

Entropy coding is lossless, so quantizing DCT blocks with the standard
Annex-K tables reproduces exactly the pixel artifacts a JPEG encoder
introduces at a given quality. Planes are processed 4:4:4 (no chroma
subsampling); images are edge-padded to block multiples and cropped back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .image import ImageRGB8, round_half_away, rgb_to_ycbcr, ycbcr_to_rgb

# ITU T.81 Annex K.1 base quantization tables
LUMA_BASE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

CHROMA_BASE = np.array([
    [17, 18, 24, 47, 99, 99, 99, 99],
    [18, 21, 26, 66, 99, 99, 99, 99],
    [24, 26, 56, 99, 99, 99, 99, 99],
    [47, 66, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
    [99, 99, 99, 99, 99, 99, 99, 99],
], dtype=np.int64)


@dataclass(frozen=True)
class QuantTables:
    luma: np.ndarray
    chroma: np.ndarray
    quality: int


def _check_quality(quality: int) -> None:
    if not isinstance(quality, (int, np.integer)) or not 1 <= quality <= 100:
        raise ValidationError(f"JPEG quality must be an integer in 1..100, got {quality!r}")


def scale_table(base: np.ndarray, quality: int) -> np.ndarray:
    """Classic IJG quality scaling of a base table."""
    _check_quality(quality)
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip((base * scale + 50) // 100, 1, 255)


def quant_tables(quality: int) -> QuantTables:
    return QuantTables(
        luma=scale_table(LUMA_BASE, quality),
        chroma=scale_table(CHROMA_BASE, quality),
        quality=int(quality),
    )


def _dct_matrix() -> np.ndarray:
    k = np.arange(8)[:, None]
    n = np.arange(8)[None, :]
    m = np.cos((2 * n + 1) * k * np.pi / 16)
    m[0] *= np.sqrt(1.0 / 8.0)
    m[1:] *= np.sqrt(2.0 / 8.0)
    return m


_DCT = _dct_matrix()


def _degrade_plane(plane: np.ndarray, table: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    blocks = plane.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3) - 128.0
    coeff = np.einsum("ij,bcjk,lk->bcil", _DCT, blocks, _DCT)
    q = round_half_away(coeff / table) * table
    rec = np.einsum("ji,bcjk,kl->bcil", _DCT, q, _DCT) + 128.0
    return rec.transpose(0, 2, 1, 3).reshape(h, w)


def jpeg_degrade(image: ImageRGB8, quality: int) -> ImageRGB8:
    """Round-trip the image through DCT quantization at the given quality."""
    tables = quant_tables(quality)
    h, w = image.height, image.width
    pad_h = (-h) % 8
    pad_w = (-w) % 8
    px = image.pixels
    if pad_h or pad_w:
        px = np.pad(px, ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")
    y, cb, cr = rgb_to_ycbcr(ImageRGB8(px))
    y = _degrade_plane(y, tables.luma)
    cb = _degrade_plane(cb, tables.chroma)
    cr = _degrade_plane(cr, tables.chroma)
    out = ycbcr_to_rgb(y, cb, cr)
    return ImageRGB8(out.pixels[:h, :w].copy())
