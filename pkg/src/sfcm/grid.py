"""Grayscale image file I/O and label-map utilities.

Supported formats:

* binary PGM (``P5``), 8-bit or 16-bit (big-endian samples);
* grayscale PNG, 8-bit or 16-bit, no alpha channel (via Pillow).

Loaded intensities are kept as raw sample values in float64 (0..255 for
8-bit data, 0..65535 for 16-bit); no rescaling happens at the I/O layer.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import ImageIOError
from .validation import check_image, check_membership

_PNG_GRAY_MODES = {"L": 8, "I": 16, "I;16": 16, "I;16B": 16}


def load_image(path) -> np.ndarray:
    """Load an 8/16-bit single-channel PGM or grayscale PNG as float64.

    Raises :class:`ImageIOError` for unreadable files, multi-channel
    inputs, and malformed headers; the message carries the path.
    """
    path = os.fspath(path)
    try:
        with open(path, "rb") as f:
            head = f.read(2)
    except OSError as exc:
        raise ImageIOError(f"{path}: cannot read file ({exc})") from exc
    if head == b"P5":
        return _load_pgm(path)
    return _load_png(path)


def save_image(img, path, bit_depth: int = 8) -> None:
    """Write ``img`` as PGM or PNG (chosen by file extension) at 8 or 16 bits.

    Values must round to integers within the chosen depth's range; loading
    the file back reproduces integer-valued data exactly.
    """
    img = check_image(img)
    path = os.fspath(path)
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    maxval = 255 if bit_depth == 8 else 65535
    rounded = np.rint(img)
    if rounded.min() < 0 or rounded.max() > maxval:
        raise ImageIOError(
            f"{path}: value out of range for {bit_depth}-bit output "
            f"(data spans [{img.min():g}, {img.max():g}], allowed [0, {maxval}])"
        )
    ext = os.path.splitext(path)[1].lower()
    if ext in (".pgm", ".pnm"):
        _save_pgm(rounded, path, maxval)
    elif ext == ".png":
        _save_png(rounded, path, bit_depth)
    else:
        raise ImageIOError(f"{path}: unsupported output extension {ext!r} (use .pgm or .png)")


def defuzzify(membership) -> np.ndarray:
    """Per-pixel argmax of a membership field; ties go to the lowest index."""
    u = check_membership(membership)
    return np.argmax(u, axis=2).astype(np.int64)


# -- PGM ---------------------------------------------------------------

def _load_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    pos = 2  # past the "P5" magic
    try:
        width, pos = _pnm_int(data, pos, path)
        height, pos = _pnm_int(data, pos, path)
        maxval, pos = _pnm_int(data, pos, path)
    except IndexError:
        raise ImageIOError(f"{path}: truncated PGM header") from None
    if width < 1 or height < 1:
        raise ImageIOError(f"{path}: zero-dimension header ({width}x{height})")
    if not 1 <= maxval <= 65535:
        raise ImageIOError(f"{path}: invalid maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    raster = data[pos:pos + need]
    if len(raster) < need:
        raise ImageIOError(f"{path}: raster truncated ({len(raster)} of {need} bytes)")
    values = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    return values.reshape(height, width)


def _pnm_int(data: bytes, pos: int, path: str) -> tuple[int, int]:
    # Skip whitespace and '#' comments, then read one decimal token.
    while True:
        while pos < len(data) and data[pos] in b" \t\r\n":
            pos += 1
        if pos < len(data) and data[pos] == ord("#"):
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos] not in b" \t\r\n":
        pos += 1
    token = data[start:pos]
    if not token.isdigit():
        raise ImageIOError(f"{path}: malformed PGM header token {token!r}")
    return int(token), pos


def _save_pgm(rounded: np.ndarray, path: str, maxval: int) -> None:
    height, width = rounded.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    body = rounded.astype(dtype).tobytes()
    try:
        with open(path, "wb") as f:
            f.write(header + body)
    except OSError as exc:
        raise ImageIOError(f"{path}: cannot write file ({exc})") from exc


# -- PNG ---------------------------------------------------------------

def _load_png(path: str) -> np.ndarray:
    try:
        with PILImage.open(path) as pil:
            mode = pil.mode
            if mode not in _PNG_GRAY_MODES:
                raise ImageIOError(f"{path}: multi-channel input (mode {mode}); expected grayscale")
            arr = np.asarray(pil)
    except UnidentifiedImageError as exc:
        raise ImageIOError(f"{path}: unreadable image ({exc})") from exc
    except OSError as exc:
        raise ImageIOError(f"{path}: cannot read file ({exc})") from exc
    return arr.astype(np.float64)


def _save_png(rounded: np.ndarray, path: str, bit_depth: int) -> None:
    if bit_depth == 8:
        pil = PILImage.fromarray(rounded.astype(np.uint8), mode="L")
    else:
        pil = PILImage.fromarray(rounded.astype(np.uint16))
    try:
        pil.save(path, format="PNG")
    except OSError as exc:
        raise ImageIOError(f"{path}: cannot write file ({exc})") from exc
