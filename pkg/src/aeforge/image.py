"""8-bit RGB images, binary PPM I/O, and BT.601 color conversion."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest with halves away from zero (the repo-wide convention)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass(frozen=True)
class ImageRGB8:
    """Row-major grid of 8-bit RGB pixels, stored as a (h, w, 3) array."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ValidationError(f"ImageRGB8 needs (h, w, 3) uint8, got {p.shape} {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValidationError("ImageRGB8 needs width >= 1 and height >= 1")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def save_ppm(image: ImageRGB8, path) -> None:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.pixels.tobytes())


def load_ppm(path) -> ImageRGB8:
    """Parse a binary (P6, maxval 255) PPM file."""
    data = Path(path).read_bytes()

    if data[:2] != b"P6":
        raise FormatError(f"{path}: expected 'P6' magic at byte 0")
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data):
            c = data[pos:pos + 1]
            if c.isspace():
                pos += 1
            elif c == b"#":  # comment runs to end of line
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos:pos + 1].isdigit():
            pos += 1
        if pos == start:
            raise FormatError(f"{path}: malformed header, expected integer at byte {start}")
        fields.append(int(data[start:pos]))
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"{path}: maxval must be 255, got {maxval}")
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad dimensions {width}x{height}")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError(f"{path}: expected whitespace after maxval at byte {pos}")
    pos += 1
    expected = width * height * 3
    actual = len(data) - pos
    if actual != expected:
        kind = "truncated" if actual < expected else "oversized"
        raise FormatError(
            f"{path}: {kind} pixel payload at byte {pos}: expected {expected} bytes, got {actual}"
        )
    pixels = np.frombuffer(data, dtype=np.uint8, offset=pos).reshape(height, width, 3)
    return ImageRGB8(pixels.copy())


# BT.601 full-range (JFIF). The inverse is the exact matrix inverse, so a
# float round trip only loses to the final integer rounding.
_RGB2YCC = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
_YCC_OFFSET = np.array([0.0, 128.0, 128.0])
_YCC2RGB = np.linalg.inv(_RGB2YCC)


def rgb_to_ycbcr(image: ImageRGB8):
    """Float64 (Y, Cb, Cr) planes of shape (h, w)."""
    rgb = image.pixels.astype(np.float64)
    ycc = rgb @ _RGB2YCC.T + _YCC_OFFSET
    return ycc[:, :, 0], ycc[:, :, 1], ycc[:, :, 2]


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> ImageRGB8:
    """Invert rgb_to_ycbcr, clamping to [0,255] and rounding half away from zero."""
    ycc = np.stack([y, cb, cr], axis=-1) - _YCC_OFFSET
    rgb = ycc @ _YCC2RGB.T
    rgb = round_half_away(np.clip(rgb, 0.0, 255.0))
    return ImageRGB8(rgb.astype(np.uint8))
