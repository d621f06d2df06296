"""Otsu's method: the threshold maximizing between-class variance.

For a split at level t, class 0 holds levels <= t and class 1 holds levels
> t.  The returned threshold maximizes

    sigma_b2(t) = w0(t) * w1(t) * (mu0(t) - mu1(t))^2

over t in [0, 254], which is equivalent to minimizing the intra-class
variance since sigma_w2(t) + sigma_b2(t) equals the total variance for
every t.  Ties are broken by the smallest t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHistogram
from .histogram import Histogram
from .imaging import BinaryMask, GrayImage


@dataclass(frozen=True)
class OtsuResult:
    """Chosen threshold plus the class statistics behind it."""

    threshold: int
    between_class_variance: float
    class_means: tuple[float, float]
    class_weights: tuple[float, float]


def otsu_threshold(hist: Histogram) -> OtsuResult:
    """Pick the Otsu threshold for a 256-bin histogram.

    Raises DegenerateHistogram when fewer than two levels occur, since no
    split can separate anything.  All statistics are computed in double
    precision from the exact integer counts.
    """
    counts = hist.counts
    if np.count_nonzero(counts) < 2:
        raise DegenerateHistogram(
            f"need at least 2 occupied levels, found {np.count_nonzero(counts)}"
        )

    levels = np.arange(256, dtype=np.float64)
    weighted = counts * levels
    total = float(counts.sum())
    total_sum = float(weighted.sum())

    # Candidate thresholds t = 0..254; class 0 is the inclusive prefix.
    n0 = np.cumsum(counts)[:255].astype(np.float64)
    s0 = np.cumsum(weighted)[:255]
    n1 = total - n0
    s1 = total_sum - s0

    valid = (n0 > 0) & (n1 > 0)
    mu0 = np.divide(s0, n0, out=np.zeros_like(s0), where=valid)
    mu1 = np.divide(s1, n1, out=np.zeros_like(s1), where=valid)
    w0 = n0 / total
    w1 = n1 / total
    sigma_b2 = np.where(valid, w0 * w1 * (mu0 - mu1) ** 2, 0.0)

    t = int(np.argmax(sigma_b2))  # first occurrence wins ties
    return OtsuResult(
        threshold=t,
        between_class_variance=float(sigma_b2[t]),
        class_means=(float(mu0[t]), float(mu1[t])),
        class_weights=(float(w0[t]), float(w1[t])),
    )


def binarize(image: GrayImage, t: int) -> BinaryMask:
    """Mask of pixels strictly above t."""
    if not 0 <= t <= 255:
        raise ValueError(f"threshold {t} outside [0, 255]")
    return BinaryMask(image.pixels > t)
