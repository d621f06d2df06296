"""256-bin histograms, cumulative distributions and histogram equalization.

Equalization uses the inclusive cumulative distribution with min-count
normalization: out = round((cum[v] - cmin) / (N - cmin) * 255), rounded
half-up, where cmin is the smallest nonzero cumulative value.  An image
occupying a single gray level is returned unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .imaging import BinaryMask, GrayImage, RgbImage

BIN_COUNT = 256


@dataclass(frozen=True, eq=False)
class Histogram:
    """Counts per intensity level, indexed 0..255."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.array(self.counts, dtype=np.int64)
        if arr.shape != (BIN_COUNT,):
            raise ValueError(f"histogram needs exactly {BIN_COUNT} bins, got {arr.shape}")
        if (arr < 0).any():
            raise ValueError("histogram counts must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True, eq=False)
class CumulativeHistogram:
    """Inclusive prefix sums of a Histogram: cum[i] = sum(counts[0..i])."""

    cum: np.ndarray

    def __post_init__(self):
        arr = np.array(self.cum, dtype=np.int64)
        if arr.shape != (BIN_COUNT,):
            raise ValueError(f"cumulative needs exactly {BIN_COUNT} bins, got {arr.shape}")
        if (np.diff(arr) < 0).any() or arr[0] < 0:
            raise ValueError("cumulative counts must be non-decreasing")
        arr.setflags(write=False)
        object.__setattr__(self, "cum", arr)

    @property
    def total(self) -> int:
        return int(self.cum[-1])


def compute_histogram(image: GrayImage, mask: BinaryMask | None = None) -> Histogram:
    """Count pixel values, optionally restricted to mask=1 pixels."""
    if mask is None:
        values = image.pixels.ravel()
    else:
        if (mask.height, mask.width) != (image.height, image.width):
            raise DimensionMismatch(
                f"mask {mask.width}x{mask.height} vs image {image.width}x{image.height}"
            )
        values = image.pixels[mask.bits]
    return Histogram(np.bincount(values, minlength=BIN_COUNT))


def cumulative(hist: Histogram) -> CumulativeHistogram:
    return CumulativeHistogram(np.cumsum(hist.counts))


def _equalization_lut(hist: Histogram) -> np.ndarray | None:
    """Level remap table for the pinned formula, or None when degenerate."""
    cum = np.cumsum(hist.counts)
    total = int(cum[-1])
    nonzero = cum[cum > 0]
    if nonzero.size == 0:
        return None
    cmin = int(nonzero[0])
    if cmin == total:
        return None
    scaled = (cum - cmin) / (total - cmin) * 255.0
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def equalize(image: GrayImage, mask: BinaryMask | None = None) -> GrayImage:
    """Equalize a gray image; with a mask, the histogram is taken over
    mask=1 pixels only while the remap is applied to the whole frame."""
    lut = _equalization_lut(compute_histogram(image, mask))
    if lut is None:
        return image
    return GrayImage(lut[image.pixels])


def equalize_rgb(image: RgbImage, mask: BinaryMask | None = None) -> RgbImage:
    """Equalize each channel plane independently."""
    out = np.empty_like(image.pixels)
    for c in range(3):
        plane = GrayImage(image.pixels[:, :, c])
        out[:, :, c] = equalize(plane, mask).pixels
    return RgbImage(out)


def histogram_csv(hist: Histogram) -> str:
    """CSV export: 256 lines of 'level,count', no header, LF endings."""
    return "".join(f"{i},{int(c)}\n" for i, c in enumerate(hist.counts))
