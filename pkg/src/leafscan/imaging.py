"""Image containers, Netpbm/PNG codecs, grayscale conversion and overlays.

Pixels are stored row-major with the origin at the top-left corner.  The
native interchange formats are binary PPM/PGM with maxval 255; PNG (8-bit
RGB or gray) is supported for convenience.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MalformedImage, UnsupportedFormat


def _frozen_array(values, dtype, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype != dtype:
        if arr.dtype.kind not in "iu":
            raise ValueError(f"{name} must be integer-valued, got {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError(f"{name} values must lie in 0..255")
        arr = arr.astype(dtype)
    else:
        arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RgbImage:
    """Rectangular grid of 8-bit (r, g, b) pixels, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.pixels, np.uint8, "pixels")
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"RgbImage needs a (h, w, 3) array, got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Single-channel grid of 8-bit intensities, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.pixels, np.uint8, "pixels")
        if arr.ndim != 2:
            raise ValueError(f"GrayImage needs a (h, w) array, got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Per-pixel 0/1 membership grid, shape (height, width)."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bits)
        if arr.dtype != np.bool_:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("mask bits must be 0 or 1")
            arr = arr.astype(bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"BinaryMask needs a (h, w) array, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        """Number of set bits."""
        return int(np.count_nonzero(self.bits))


# BT.601 luma weights; rounding is half-up so results are bit-exact.
_GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def to_grayscale(image: RgbImage) -> GrayImage:
    """Convert to gray via 0.299 r + 0.587 g + 0.114 b, rounded half-up."""
    planes = image.pixels.astype(np.float64)
    luma = (
        _GRAY_WEIGHTS[0] * planes[:, :, 0]
        + _GRAY_WEIGHTS[1] * planes[:, :, 1]
        + _GRAY_WEIGHTS[2] * planes[:, :, 2]
    )
    return GrayImage(np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8))


def overlay(image: RgbImage, mask: BinaryMask, tint: tuple[int, int, int]) -> RgbImage:
    """Return a copy of `image` with mask=1 pixels replaced by `tint`."""
    if (mask.height, mask.width) != (image.height, image.width):
        raise DimensionMismatch(
            f"mask {mask.width}x{mask.height} vs image {image.width}x{image.height}"
        )
    out = image.pixels.copy()
    out[mask.bits] = np.asarray(tint, dtype=np.uint8)
    return RgbImage(out)


# --- Netpbm / PNG codecs ---

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class _NetpbmReader:
    """Token reader for Netpbm headers; '#' starts a comment through newline."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def next_token(self) -> bytes:
        data, n = self.data, len(self.data)
        i = self.pos
        while i < n:
            c = data[i : i + 1]
            if c == b"#":
                while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                    i += 1
            elif c.isspace():
                i += 1
            else:
                break
        if i >= n:
            raise MalformedImage("unexpected end of header")
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        self.pos = i
        return data[start:i]

    def next_int(self, what: str) -> int:
        tok = self.next_token()
        if not re.fullmatch(rb"\d+", tok):
            raise MalformedImage(f"invalid {what}: {tok!r}")
        return int(tok)

    def skip_single_whitespace(self):
        # Binary payload begins after exactly one whitespace byte.
        if self.pos >= len(self.data) or not self.data[self.pos : self.pos + 1].isspace():
            raise MalformedImage("missing separator before binary payload")
        self.pos += 1

    def rest(self) -> bytes:
        return self.data[self.pos :]


def _decode_netpbm(data: bytes) -> RgbImage:
    reader = _NetpbmReader(data)
    magic = reader.next_token()
    width = reader.next_int("width")
    height = reader.next_int("height")
    maxval = reader.next_int("maxval")
    if width < 1 or height < 1:
        raise MalformedImage(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"only maxval 255 is supported, got {maxval}")

    channels = 3 if magic in (b"P3", b"P6") else 1
    n_samples = width * height * channels

    if magic in (b"P2", b"P3"):
        body = reader.rest()
        tokens = re.sub(rb"#[^\n\r]*", b"", body).split()
        if len(tokens) != n_samples:
            raise MalformedImage(
                f"expected {n_samples} samples, found {len(tokens)}"
            )
        try:
            samples = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError:
            raise MalformedImage("non-numeric sample in plain payload") from None
        if samples.min() < 0 or samples.max() > 255:
            raise MalformedImage("sample out of range 0..255")
        flat = samples.astype(np.uint8)
    else:
        reader.skip_single_whitespace()
        payload = reader.rest()
        if len(payload) != n_samples:
            raise MalformedImage(
                f"expected {n_samples} payload bytes, found {len(payload)}"
            )
        flat = np.frombuffer(payload, dtype=np.uint8)

    if channels == 3:
        return RgbImage(flat.reshape(height, width, 3))
    gray = flat.reshape(height, width)
    return RgbImage(np.repeat(gray[:, :, np.newaxis], 3, axis=2))


def _decode_png(data: bytes) -> RgbImage:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(io.BytesIO(data)) as im:
            return RgbImage(np.asarray(im.convert("RGB")))
    except UnidentifiedImageError as exc:
        raise MalformedImage(f"unreadable PNG: {exc}") from exc
    except OSError as exc:
        raise MalformedImage(f"truncated or corrupt PNG: {exc}") from exc


def decode_image(data: bytes, format_hint: str | None = None) -> RgbImage:
    """Decode PPM (P3/P6), PGM (P2/P5) or PNG bytes into an RgbImage.

    Gray formats are promoted to equal-channel triplets.  Raises
    MalformedImage for structural problems, UnsupportedFormat for
    unrecognised or unsupported variants.
    """
    if data.startswith(_PNG_MAGIC):
        return _decode_png(data)
    magic = data[:2]
    if magic in (b"P2", b"P3", b"P5", b"P6"):
        return _decode_netpbm(data)
    if magic in (b"P1", b"P4"):
        raise UnsupportedFormat("PBM bitmaps are not supported")
    if format_hint and format_hint.lower() == "png":
        return _decode_png(data)
    raise UnsupportedFormat(f"unrecognised image magic {data[:8]!r}")


def _image_planes(image: RgbImage | GrayImage | BinaryMask) -> np.ndarray:
    """uint8 sample grid for encoding; masks map 0 -> 0 and 1 -> 255."""
    if isinstance(image, RgbImage):
        return image.pixels
    if isinstance(image, GrayImage):
        return image.pixels
    return image.bits.astype(np.uint8) * 255


def encode_image(image: RgbImage | GrayImage | BinaryMask, format: str) -> bytes:
    """Encode an image as 'p2', 'p3', 'p5', 'p6' or 'png' bytes.

    Color images require p3/p6/png; gray images and masks require p2/p5/png.
    """
    fmt = format.lower()
    arr = _image_planes(image)
    is_color = arr.ndim == 3

    if fmt == "png":
        from PIL import Image

        buf = io.BytesIO()
        Image.fromarray(arr, "RGB" if is_color else "L").save(buf, "PNG")
        return buf.getvalue()

    if fmt not in ("p2", "p3", "p5", "p6"):
        raise UnsupportedFormat(f"unknown encode format {format!r}")
    if is_color != (fmt in ("p3", "p6")):
        kind = "color" if is_color else "gray"
        raise UnsupportedFormat(f"cannot encode {kind} image as {fmt.upper()}")

    height, width = arr.shape[:2]
    header = f"{fmt.upper()}\n{width} {height}\n255\n".encode("ascii")
    if fmt in ("p5", "p6"):
        return header + arr.tobytes()
    rows = arr.reshape(height, -1)
    body = "".join(" ".join(str(v) for v in row) + "\n" for row in rows)
    return header + body.encode("ascii")
