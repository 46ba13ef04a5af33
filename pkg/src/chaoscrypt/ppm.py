"""Binary PPM (P6) / PGM (P5) codec, maxval 255 only."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import DimensionMismatch, MalformedHeader, TruncatedData, UnsupportedMaxval

_WS = b" \t\r\n\v\f"


@dataclass(frozen=True)
class RgbImage:
    """Row-major, channel-interleaved 8-bit image (channels is 1 or 3)."""

    width: int
    height: int
    channels: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DimensionMismatch(f"image must be at least 1x1, got {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise DimensionMismatch(f"channels must be 1 or 3, got {self.channels}")
        if len(self.data) != self.width * self.height * self.channels:
            raise DimensionMismatch(
                f"data length {len(self.data)} != {self.width}*{self.height}*{self.channels}"
            )

    @property
    def shape(self):
        return (self.height, self.width, self.channels)

    def to_array(self) -> np.ndarray:
        """(H, W, C) uint8 view of the pixel data."""
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.shape)

    @classmethod
    def from_array(cls, arr) -> "RgbImage":
        arr = np.asarray(arr)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise DimensionMismatch(f"expected (H, W) or (H, W, C) array, got shape {arr.shape}")
        h, w, c = arr.shape
        return cls(w, h, c, np.ascontiguousarray(arr, dtype=np.uint8).tobytes())


def _tokens(buf: bytes, count: int):
    """Read ``count`` header tokens, skipping whitespace and # comments.

    Returns the tokens and the offset of the single whitespace byte that ends
    the last one.
    """
    toks = []
    i, n = 0, len(buf)
    while len(toks) < count:
        while i < n and buf[i] in _WS:
            i += 1
        if i < n and buf[i] == ord("#"):
            while i < n and buf[i] not in b"\r\n":
                i += 1
            continue
        if i >= n:
            raise MalformedHeader("header ends prematurely")
        start = i
        while i < n and buf[i] not in _WS and buf[i] != ord("#"):
            i += 1
        toks.append(buf[start:i])
    if i >= n or buf[i] not in _WS:
        raise MalformedHeader("header must end with a single whitespace byte")
    return toks, i


def load_ppm(buf: bytes) -> RgbImage:
    (magic, *dims), end = _tokens(buf, 4)
    if magic not in (b"P5", b"P6"):
        raise MalformedHeader(f"unsupported magic {magic!r}; only P5/P6 are read")
    try:
        w, h, maxval = (int(t) for t in dims)
    except ValueError:
        raise MalformedHeader(f"non-numeric header field in {dims!r}") from None
    if w < 1 or h < 1:
        raise MalformedHeader(f"bad dimensions {w}x{h}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} not supported (only 255)")
    channels = 3 if magic == b"P6" else 1
    size = w * h * channels
    pixels = buf[end + 1 : end + 1 + size]
    if len(pixels) < size:
        raise TruncatedData(f"expected {size} pixel bytes, found {len(pixels)}")
    return RgbImage(w, h, channels, bytes(pixels))


def save_ppm(img: RgbImage) -> bytes:
    magic = b"P6" if img.channels == 3 else b"P5"
    return magic + b"\n%d %d\n255\n" % (img.width, img.height) + img.data


def read_image(path) -> RgbImage:
    with open(path, "rb") as fh:
        return load_ppm(fh.read())


def write_image(path, img: RgbImage) -> None:
    with open(path, "wb") as fh:
        fh.write(save_ppm(img))


def reference_image() -> RgbImage:
    """The bundled 256x256 RGB test image."""
    return load_ppm((resources.files("chaoscrypt") / "data" / "reference_256.ppm").read_bytes())
