"""Flat binary weight container.

Layout (all little-endian):
  magic "AEFG" | u32 version | u32 param count
  per parameter: u32 name length | utf-8 name | u32 rank | u64 dims... | f32 data

Round-trips are bit-exact; loading preserves save order.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"AEFG"
VERSION = 1


def save_checkpoint(path, arrays: dict[str, np.ndarray]) -> None:
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<II", VERSION, len(arrays))
    for name, arr in arrays.items():
        if arr.dtype != np.float32:
            raise FormatError(f"checkpoint arrays must be float32, {name!r} is {arr.dtype}")
        enc = name.encode("utf-8")
        blob += struct.pack("<I", len(enc))
        blob += enc
        blob += struct.pack("<I", arr.ndim)
        blob += struct.pack(f"<{arr.ndim}Q", *arr.shape)
        blob += np.ascontiguousarray(arr, dtype="<f4").tobytes()
    Path(path).write_bytes(bytes(blob))


class _Reader:
    def __init__(self, buf: bytes, path):
        self.buf = buf
        self.off = 0
        self.path = path

    def take(self, n: int, what: str) -> bytes:
        if self.off + n > len(self.buf):
            raise FormatError(
                f"{self.path}: truncated checkpoint reading {what} at byte {self.off} "
                f"(need {n}, have {len(self.buf) - self.off})"
            )
        out = self.buf[self.off:self.off + n]
        self.off += n
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]


def load_checkpoint(path) -> dict[str, np.ndarray]:
    buf = Path(path).read_bytes()
    r = _Reader(buf, path)
    if r.take(4, "magic") != MAGIC:
        raise FormatError(f"{path}: bad magic at byte 0, not an AEFG checkpoint")
    version = r.u32("version")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    count = r.u32("parameter count")
    arrays: dict[str, np.ndarray] = {}
    for _ in range(count):
        name_len = r.u32("name length")
        name = r.take(name_len, "name").decode("utf-8")
        rank = r.u32("rank")
        dims = struct.unpack(f"<{rank}Q", r.take(8 * rank, "dims"))
        n = 1
        for d in dims:
            n *= d
        raw = r.take(4 * n, f"data of {name!r}")
        arrays[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).copy()
    if r.off != len(buf):
        raise FormatError(f"{path}: {len(buf) - r.off} trailing bytes at offset {r.off}")
    return arrays


def file_hash(path) -> str:
    """sha256 of the checkpoint bytes, hex."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
