"""Binary PPM (P6) and PGM (P5) codecs, maxval 255 only."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import DataError

_WS = b" \t\r\n"


def _tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens; return them and the raster offset."""
    toks: list[bytes] = []
    pos = 0
    while len(toks) < count:
        while pos < len(buf) and buf[pos] in _WS:
            pos += 1
        if pos < len(buf) and buf[pos] == ord("#"):
            while pos < len(buf) and buf[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(buf) and buf[pos] not in _WS:
            pos += 1
        if start == pos:
            raise DataError("truncated PNM header")
        toks.append(buf[start:pos])
    if pos >= len(buf) or buf[pos] not in _WS:
        raise DataError("PNM header must end with a single whitespace byte")
    return toks, pos + 1


def decode(buf: bytes) -> np.ndarray:
    """Decode P6/P5 bytes to a uint8 array of shape (h, w, 3) or (h, w)."""
    toks, offset = _tokens(buf, 4)
    magic = toks[0]
    if magic not in (b"P6", b"P5"):
        raise DataError(f"unsupported PNM magic {magic!r}; expected P6 or P5")
    try:
        width, height, maxval = (int(t) for t in toks[1:])
    except ValueError as exc:
        raise DataError(f"malformed PNM header: {exc}") from None
    if width <= 0 or height <= 0:
        raise DataError(f"bad image size {width}x{height}")
    if maxval != 255:
        raise DataError(f"maxval must be 255, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    need = width * height * channels
    raster = buf[offset : offset + need]
    if len(raster) != need:
        raise DataError(f"PNM raster truncated: expected {need} bytes, got {len(raster)}")
    arr = np.frombuffer(raster, dtype=np.uint8)
    return arr.reshape(height, width, 3) if channels == 3 else arr.reshape(height, width)


def encode(pixels: np.ndarray) -> bytes:
    """Encode uint8 (h, w, 3) as P6 or (h, w) as P5 with the canonical header."""
    arr = np.asarray(pixels)
    if arr.dtype != np.uint8:
        raise ValueError("encode expects uint8 pixels")
    if arr.ndim == 3 and arr.shape[2] == 3:
        magic = b"P6"
    elif arr.ndim == 2:
        magic = b"P5"
    else:
        raise ValueError(f"unsupported pixel array shape {arr.shape}")
    h, w = arr.shape[:2]
    return magic + b"\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(arr).tobytes()


def read(path: str | os.PathLike) -> np.ndarray:
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read image {path}: {exc.strerror}") from None
    try:
        return decode(buf)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def write(path: str | os.PathLike, pixels: np.ndarray) -> None:
    Path(path).write_bytes(encode(pixels))
