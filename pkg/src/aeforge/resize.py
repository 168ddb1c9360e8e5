"""Bilinear resampling with half-pixel-center source coordinates."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .image import ImageRGB8, round_half_away


def scaled_dim(dim: int, scale: float) -> int:
    return max(1, int(round_half_away(np.float64(dim * scale))))


def resize_bilinear(image: ImageRGB8, scale: float) -> ImageRGB8:
    """Resample by a scale factor; degradation uses scale in (0,1].

    Scales above 1 are accepted for the upscale-small inference path.
    """
    if scale <= 0:
        raise ValidationError(f"resize scale must be positive, got {scale}")
    h, w = image.height, image.width
    out_h, out_w = scaled_dim(h, scale), scaled_dim(w, scale)
    if (out_h, out_w) == (h, w) and scale == 1.0:
        return ImageRGB8(image.pixels.copy())

    sy = np.clip((np.arange(out_h, dtype=np.float64) + 0.5) / scale - 0.5, 0, h - 1)
    sx = np.clip((np.arange(out_w, dtype=np.float64) + 0.5) / scale - 0.5, 0, w - 1)
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (sy - y0)[:, None, None]
    fx = (sx - x0)[None, :, None]

    px = image.pixels.astype(np.float64)
    top = px[y0][:, x0] * (1 - fx) + px[y0][:, x1] * fx
    bot = px[y1][:, x0] * (1 - fx) + px[y1][:, x1] * fx
    val = top * (1 - fy) + bot * fy
    return ImageRGB8(round_half_away(val).astype(np.uint8))
