"""Image file ingestion and output.

PPM (binary P5 grayscale / P6 color, maxval 255) is the deterministic native
format; PNG (8-bit grayscale or RGB, non-interlaced) is accepted as a
convenience input.  All output images are written as PPM P6.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import ParseError
from .image import RasterImage

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def read_image(path) -> RasterImage:
    """Decode a PPM (P5/P6) or PNG (8-bit gray/RGB) file."""
    data = Path(path).read_bytes()
    if data[:2] in (b"P5", b"P6"):
        return _decode_ppm(data)
    if data[:8] == _PNG_SIGNATURE:
        return _decode_png(data)
    raise ParseError(f"{path}: not a PPM (P5/P6) or PNG file")


def write_ppm(img: RasterImage, path) -> None:
    """Write a binary P6 PPM, maxval 255."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.pixels.tobytes())


# --- PPM ---------------------------------------------------------------

def _decode_ppm(data: bytes) -> RasterImage:
    magic = data[:2]
    pos = 2
    fields = []
    while len(fields) < 3:
        # Skip whitespace and '#' comments between header tokens.
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated PPM header")
        token = data[start:pos]
        if not token.isdigit():
            raise ParseError(f"bad PPM header token {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ParseError(f"bad PPM dimensions {width}x{height}")
    if maxval != 255:
        raise ParseError(f"unsupported PPM maxval {maxval} (need 255)")
    pos += 1  # single whitespace byte after maxval
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    raw = data[pos : pos + need]
    if len(raw) < need:
        raise ParseError("truncated PPM pixel data")
    arr = np.frombuffer(raw, dtype=np.uint8)
    if channels == 1:
        return RasterImage.from_gray(arr.reshape(height, width))
    return RasterImage(arr.reshape(height, width, 3))


# --- PNG ---------------------------------------------------------------

def _decode_png(data: bytes) -> RasterImage:
    pos = 8
    ihdr = None
    idat = bytearray()
    while pos + 8 <= len(data):
        length, ctype = struct.unpack(">I4s", data[pos : pos + 8])
        chunk = data[pos + 8 : pos + 8 + length]
        if len(chunk) < length:
            raise ParseError("truncated PNG chunk")
        if ctype == b"IHDR":
            ihdr = struct.unpack(">IIBBBBB", chunk)
        elif ctype == b"IDAT":
            idat.extend(chunk)
        elif ctype == b"IEND":
            break
        pos += 12 + length  # length + type + data + crc
    if ihdr is None:
        raise ParseError("PNG missing IHDR")
    width, height, depth, color, compression, filt, interlace = ihdr
    if depth != 8:
        raise ParseError(f"unsupported PNG bit depth {depth} (need 8)")
    if color not in (0, 2):
        raise ParseError(f"unsupported PNG color type {color} (need gray or RGB)")
    if compression != 0 or filt != 0:
        raise ParseError("unsupported PNG compression/filter method")
    if interlace != 0:
        raise ParseError("interlaced PNG not supported")
    if width < 1 or height < 1:
        raise ParseError(f"bad PNG dimensions {width}x{height}")
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise ParseError(f"bad PNG stream: {exc}") from exc
    channels = 1 if color == 0 else 3
    stride = width * channels
    if len(raw) != (stride + 1) * height:
        raise ParseError("PNG pixel data has wrong length")
    out = np.empty((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        ftype = raw[y * (stride + 1)]
        line = np.frombuffer(
            raw, dtype=np.uint8, count=stride, offset=y * (stride + 1) + 1
        ).copy()
        out[y] = _unfilter(ftype, line, prev, channels)
        prev = out[y]
    if channels == 1:
        return RasterImage.from_gray(out)
    return RasterImage(out.reshape(height, width, 3))


def _unfilter(ftype: int, line: np.ndarray, prev: np.ndarray, bpp: int) -> np.ndarray:
    if ftype == 0:  # None
        return line
    if ftype == 2:  # Up
        return (line.astype(np.int32) + prev).astype(np.uint8)
    # Sub/Average/Paeth need the already-reconstructed left neighbor: sequential.
    cur = line.astype(np.int32)
    up = prev.astype(np.int32)
    if ftype == 1:  # Sub
        for i in range(bpp, len(cur)):
            cur[i] = (cur[i] + cur[i - bpp]) & 0xFF
    elif ftype == 3:  # Average
        for i in range(len(cur)):
            left = cur[i - bpp] if i >= bpp else 0
            cur[i] = (cur[i] + (left + up[i]) // 2) & 0xFF
    elif ftype == 4:  # Paeth
        for i in range(len(cur)):
            a = cur[i - bpp] if i >= bpp else 0
            b = up[i]
            c = up[i - bpp] if i >= bpp else 0
            p = a + b - c
            pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
            if pa <= pb and pa <= pc:
                pred = a
            elif pb <= pc:
                pred = b
            else:
                pred = c
            cur[i] = (cur[i] + pred) & 0xFF
    else:
        raise ParseError(f"unknown PNG filter type {ftype}")
    return cur.astype(np.uint8)
