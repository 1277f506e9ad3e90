"""RGB frames, binary masks, and the PPM/PGM files used to move them around.

A Frame owns its pixel array and freezes it on construction; everything
downstream can hand frames between threads without copying. PPM (P6) is the
only frame file format and PGM (P5) the only mask format -- both are trivial
to parse and need no codec.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


class FormatError(ValueError):
    """A netpbm file that cannot be used (bad magic, maxval, truncation)."""


@dataclass(frozen=True, eq=False)
class Frame:
    """One RGB frame: row-major (height, width, 3) uint8 raster plus a timestamp.

    The pixel array is made read-only on construction; pass a copy if you
    still need to write to it.
    """

    pixels: np.ndarray
    timestamp_ms: float = 0.0

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.ndim != 3 or px.shape[2] != 3:
            raise ValueError("frame pixels must be a (height, width, 3) array")
        if px.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {px.dtype}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("frame dimensions must be at least 1x1")
        if not px.flags["C_CONTIGUOUS"]:
            px = np.ascontiguousarray(px)
            object.__setattr__(self, "pixels", px)
        px.setflags(write=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def with_timestamp(self, timestamp_ms: float) -> "Frame":
        return Frame(self.pixels, timestamp_ms)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster with the same dimensions as the frame it came from."""

    bits: np.ndarray

    def __post_init__(self):
        bits = self.bits
        if not isinstance(bits, np.ndarray) or bits.ndim != 2:
            raise ValueError("mask bits must be a (height, width) array")
        if bits.dtype != np.bool_:
            raise ValueError(f"mask bits must be bool, got {bits.dtype}")
        if not bits.flags["C_CONTIGUOUS"]:
            bits = np.ascontiguousarray(bits)
            object.__setattr__(self, "bits", bits)
        bits.setflags(write=False)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


def _next_token(data: bytes, pos: int, path: str) -> tuple[bytes, int]:
    # netpbm headers: tokens separated by whitespace, '#' comments run to EOL
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise FormatError(f"{path}: truncated header")
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def read_ppm(path: str | os.PathLike) -> Frame:
    """Read a binary PPM (P6, maxval 255) into a Frame with timestamp 0."""
    path = os.fspath(path)
    with open(path, "rb") as f:
        data = f.read()
    magic, pos = _next_token(data, 0, path)
    if magic != b"P6":
        raise FormatError(f"{path}: expected P6 magic, got {magic!r}")
    fields = []
    for _ in range(3):
        tok, pos = _next_token(data, pos, path)
        try:
            fields.append(int(tok))
        except ValueError:
            raise FormatError(f"{path}: bad header token {tok!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise FormatError(f"{path}: maxval must be 255, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos : pos + width * height * 3]
    if len(raster) != width * height * 3:
        raise FormatError(f"{path}: raster truncated ({len(raster)} bytes)")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3).copy()
    return Frame(pixels)


def write_ppm(frame: Frame, path: str | os.PathLike) -> None:
    """Write a Frame as binary PPM (P6, maxval 255)."""
    with open(os.fspath(path), "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (frame.width, frame.height))
        f.write(frame.pixels.tobytes())


def write_pgm(mask: BinaryMask, path: str | os.PathLike) -> None:
    """Write a BinaryMask as binary PGM (P5), true pixels as 255."""
    raster = np.where(mask.bits, 255, 0).astype(np.uint8)
    with open(os.fspath(path), "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (mask.width, mask.height))
        f.write(raster.tobytes())
