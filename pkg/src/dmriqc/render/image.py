"""Deterministic raster primitives: PNG encoding, palette, bitmap text.

Renders must be byte-stable across runs and machines, so everything here
is fixed-function: a minimal PNG encoder (zlib level 6, no ancillary
chunks, no timestamps), a hash-derived label palette, and an embedded
5x7 bitmap font (the classic public-domain LCD font) instead of any
system font.
"""

from __future__ import annotations

import colorsys
import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import IoFailure

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def png_bytes(rgb: np.ndarray) -> bytes:
    """Encode an (H, W, 3) uint8 array as a deterministic PNG."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.size == 0:
        raise ValueError(f"expected non-empty (H, W, 3) image, got {rgb.shape}")
    h, w = rgb.shape[:2]
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    raw = b"".join(b"\x00" + rgb[row].tobytes() for row in range(h))
    idat = zlib.compress(raw, 6)
    return PNG_SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def write_png(rgb: np.ndarray, path: str | Path) -> None:
    try:
        Path(path).write_bytes(png_bytes(rgb))
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc


def decode_png(blob: bytes) -> np.ndarray:
    """Inverse of png_bytes for our own output (filter-0 RGB8 only)."""
    if not blob.startswith(PNG_SIGNATURE):
        raise ValueError("not a PNG")
    pos = len(PNG_SIGNATURE)
    w = h = None
    idat = b""
    while pos < len(blob):
        (length,) = struct.unpack_from(">I", blob, pos)
        tag = blob[pos + 4 : pos + 8]
        payload = blob[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            w, h, depth, ctype = struct.unpack_from(">IIBB", payload, 0)
            if depth != 8 or ctype != 2:
                raise ValueError("decode_png only handles 8-bit RGB")
        elif tag == b"IDAT":
            idat += payload
        elif tag == b"IEND":
            break
    if w is None:
        raise ValueError("missing IHDR")
    raw = zlib.decompress(idat)
    stride = 1 + w * 3
    rows = []
    for r in range(h):
        line = raw[r * stride : (r + 1) * stride]
        if line[0] != 0:
            raise ValueError(f"unsupported filter {line[0]}")
        rows.append(np.frombuffer(line[1:], dtype=np.uint8).reshape(w, 3))
    return np.stack(rows)


def label_color(label_id: int) -> tuple[int, int, int]:
    """Stable palette: label id -> RGB via crc32-derived hue."""
    hue = (zlib.crc32(str(int(label_id)).encode("ascii")) % 360) / 360.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.9, 1.0)
    return (int(round(r * 255)), int(round(g * 255)), int(round(b * 255)))


def heat_colormap(values: np.ndarray) -> np.ndarray:
    """Black-red-yellow-white ramp over values in [0, 1]."""
    t = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    r = np.clip(3.0 * t, 0.0, 1.0)
    g = np.clip(3.0 * t - 1.0, 0.0, 1.0)
    b = np.clip(3.0 * t - 2.0, 0.0, 1.0)
    return (np.stack([r, g, b], axis=-1) * 255.0).round().astype(np.uint8)


def scale_nearest(img: np.ndarray, factor: int) -> np.ndarray:
    """Integer nearest-neighbor upscale."""
    if factor <= 1:
        return img
    return np.repeat(np.repeat(img, factor, axis=0), factor, axis=1)


# Classic 5x7 LCD font, 5 column bytes per glyph, LSB at the top row.
# Covers printable ASCII 0x20..0x7E; anything else renders as '?'.
_FONT_HEX = (
    "0000000000"  # space
    "00005F0000"  # !
    "0007000700"  # "
    "147F147F14"  # #
    "242A7F2A12"  # $
    "2313086462"  # %
    "3649552250"  # &
    "0005030000"  # '
    "001C224100"  # (
    "0041221C00"  # )
    "082A1C2A08"  # *
    "08083E0808"  # +
    "0050300000"  # ,
    "0808080808"  # -
    "0060600000"  # .
    "2010080402"  # /
    "3E5149453E"  # 0
    "00427F4000"  # 1
    "4261514946"  # 2
    "2141454B31"  # 3
    "1814127F10"  # 4
    "2745454539"  # 5
    "3C4A494930"  # 6
    "0171090503"  # 7
    "3649494936"  # 8
    "064949291E"  # 9
    "0036360000"  # :
    "0056360000"  # ;
    "0008142241"  # <
    "1414141414"  # =
    "4122140800"  # >
    "0201510906"  # ?
    "324979413E"  # @
    "7E1111117E"  # A
    "7F49494936"  # B
    "3E41414122"  # C
    "7F4141221C"  # D
    "7F49494941"  # E
    "7F09090101"  # F
    "3E41415132"  # G
    "7F0808087F"  # H
    "00417F4100"  # I
    "2040413F01"  # J
    "7F08142241"  # K
    "7F40404040"  # L
    "7F0204027F"  # M
    "7F0408107F"  # N
    "3E4141413E"  # O
    "7F09090906"  # P
    "3E4151215E"  # Q
    "7F09192946"  # R
    "4649494931"  # S
    "01017F0101"  # T
    "3F4040403F"  # U
    "1F2040201F"  # V
    "7F2018207F"  # W
    "6314081463"  # X
    "0304780403"  # Y
    "6151494543"  # Z
    "00007F4141"  # [
    "0204081020"  # \\
    "41417F0000"  # ]
    "0402010204"  # ^
    "4040404040"  # _
    "0001020400"  # `
    "2054545478"  # a
    "7F48444438"  # b
    "3844444420"  # c
    "384444487F"  # d
    "3854545418"  # e
    "087E090102"  # f
    "081454543C"  # g
    "7F08040478"  # h
    "00447D4000"  # i
    "2040443D00"  # j
    "007F102844"  # k
    "00417F4000"  # l
    "7C04180478"  # m
    "7C08040478"  # n
    "3844444438"  # o
    "7C14141408"  # p
    "081414187C"  # q
    "7C08040408"  # r
    "4854545420"  # s
    "043F444020"  # t
    "3C4040207C"  # u
    "1C2040201C"  # v
    "3C4030403C"  # w
    "4428102844"  # x
    "0C5050503C"  # y
    "4464544C44"  # z
    "0008364100"  # {
    "00007F0000"  # |
    "0041360800"  # }
    "0804081008"  # ~
)

FONT_W, FONT_H = 5, 7
_GLYPHS: dict[str, bytes] = {}
for _i in range(95):
    _GLYPHS[chr(0x20 + _i)] = bytes.fromhex(_FONT_HEX[_i * 10 : _i * 10 + 10])


def draw_text(
    img: np.ndarray,
    text: str,
    row: int,
    col: int,
    color: tuple[int, int, int] = (255, 255, 255),
    scale: int = 1,
) -> None:
    """Blit text in the embedded font; clips at the image edge."""
    h, w = img.shape[:2]
    x = col
    for ch in text:
        glyph = _GLYPHS.get(ch, _GLYPHS["?"])
        for gx in range(FONT_W):
            bits = glyph[gx]
            for gy in range(FONT_H):
                if bits & (1 << gy):
                    r0 = row + gy * scale
                    c0 = x + gx * scale
                    if r0 + scale <= h and c0 + scale <= w and r0 >= 0 and c0 >= 0:
                        img[r0 : r0 + scale, c0 : c0 + scale] = color
        x += (FONT_W + 1) * scale


def text_width(text: str, scale: int = 1) -> int:
    return len(text) * (FONT_W + 1) * scale
