"""8-bit PGM (P2/P5) and lossless FIMG text images."""

from __future__ import annotations

import os

import numpy as np

from .imaging import CartesianImage


class ImageFormatError(ValueError):
    """Malformed image header or body."""


class UnsupportedMaxval(ImageFormatError):
    """PGM maxval outside the 8-bit range."""


class ImageIOError(OSError):
    """The file could not be read or written."""


def _read_bytes(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ImageIOError(f"cannot read {path}: {exc}") from exc


def _write_bytes(path, data: bytes):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


def _header_tokens(data: bytes, count: int):
    """First ``count`` whitespace tokens (comments skipped) and the body offset."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes) -> CartesianImage:
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(f"not a P2/P5 PGM (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"non-integer PGM header field: {exc}") from exc
    if width < 1 or height < 1:
        raise ImageFormatError(f"bad PGM dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise UnsupportedMaxval(f"maxval {maxval} is not 8-bit")
    n = width * height
    if magic == b"P5":
        body = data[pos + 1:pos + 1 + n]
        if len(body) != n:
            raise ImageFormatError(f"P5 body has {len(body)} bytes, expected {n}")
        raw = np.frombuffer(body, dtype=np.uint8).astype(float)
    else:
        try:
            raw = np.array([int(t) for t in data[pos:].split()], dtype=float)
        except ValueError as exc:
            raise ImageFormatError(f"non-integer P2 sample: {exc}") from exc
        if raw.size != n:
            raise ImageFormatError(f"P2 body has {raw.size} samples, expected {n}")
    if raw.max(initial=0) > maxval:
        raise ImageFormatError("sample exceeds maxval")
    return CartesianImage(raw.reshape(height, width) / maxval)


def load_pgm(path) -> CartesianImage:
    return parse_pgm(_read_bytes(path))


def quantize(img: CartesianImage, rescale: bool = False) -> np.ndarray:
    """Map to 0..255 with round-half-up; clamp to [0, 1] unless ``rescale``."""
    v = img.values
    if rescale:
        lo, hi = v.min(), v.max()
        v = (v - lo) / (hi - lo) if hi > lo else np.zeros_like(v)
    v = np.clip(v, 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).astype(np.uint8)


def save_pgm(img: CartesianImage, path, rescale: bool = False, binary: bool = True):
    q = quantize(img, rescale)
    h, w = q.shape
    if binary:
        data = f"P5\n{w} {h}\n255\n".encode() + q.tobytes()
    else:
        lines = [" ".join(str(int(x)) for x in row) for row in q]
        data = (f"P2\n{w} {h}\n255\n" + "\n".join(lines) + "\n").encode()
    _write_bytes(path, data)


def save_fimg(img: CartesianImage, path):
    lines = [f"FIMG {img.width} {img.height} {float(img.pitch)!r}"]
    lines.extend(" ".join(repr(float(x)) for x in row) for row in img.values)
    _write_bytes(path, ("\n".join(lines) + "\n").encode())


def parse_fimg(data: bytes) -> CartesianImage:
    parts = data.split()
    if len(parts) < 4 or parts[0] != b"FIMG":
        raise ImageFormatError("not an FIMG file")
    try:
        w, h = int(parts[1]), int(parts[2])
        pitch = float(parts[3])
        vals = np.array([float(t) for t in parts[4:]])
    except ValueError as exc:
        raise ImageFormatError(f"bad FIMG field: {exc}") from exc
    if w < 1 or h < 1 or vals.size != w * h:
        raise ImageFormatError(f"FIMG body has {vals.size} values, expected {w}x{h}")
    return CartesianImage(vals.reshape(h, w), pitch)


def load_fimg(path) -> CartesianImage:
    return parse_fimg(_read_bytes(path))


def load_image(path) -> CartesianImage:
    """Load by content: FIMG header or PGM magic."""
    data = _read_bytes(path)
    if data.startswith(b"FIMG"):
        return parse_fimg(data)
    return parse_pgm(data)


def save_image(img: CartesianImage, path, rescale: bool = False):
    """Save by extension: ``.fimg`` is lossless, anything else is 8-bit PGM."""
    if os.fspath(path).lower().endswith(".fimg"):
        save_fimg(img, path)
    else:
        save_pgm(img, path, rescale=rescale)
