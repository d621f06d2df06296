"""Synthetic leaf fixtures with exact ground-truth masks.

A centered disk (the leaf) sits on a flat background; an inner region gets
a second tone so the leaf never collapses to a single color, and a
concentric lesion overrides the disk colors.  The lesion is the set of
disk pixels nearest the center, sized to the requested fraction of the
disk pixel count, so the mask ratio is exact to within rounding of a
single pixel.  Lesion tissue stays flat even when noise is requested so
it occupies one gray level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import BinaryMask, RgbImage

Color = tuple[int, int, int]


@dataclass(frozen=True)
class SyntheticLeafParams:
    size: int = 256
    disk_fraction: float = 0.30
    lesion_fraction: float = 0.10
    bg_color: Color = (255, 255, 255)
    leaf_color: Color = (34, 139, 34)
    leaf_color_inner: Color = (26, 105, 26)
    lesion_color: Color = (139, 90, 43)
    noise: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.size < 4:
            raise ValueError(f"size must be >= 4, got {self.size}")
        if not 0.0 < self.disk_fraction < 1.0:
            raise ValueError(f"disk_fraction must be in (0, 1), got {self.disk_fraction}")
        if not 0.0 <= self.lesion_fraction <= 1.0:
            raise ValueError(
                f"lesion_fraction must be in [0, 1], got {self.lesion_fraction}"
            )
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")


def generate_leaf(
    params: SyntheticLeafParams,
) -> tuple[RgbImage, BinaryMask, BinaryMask]:
    """Build (image, disk_mask, lesion_mask) for the given parameters."""
    size = params.size
    center = (size - 1) / 2.0
    ys, xs = np.mgrid[0:size, 0:size]
    d2 = (xs - center) ** 2 + (ys - center) ** 2

    disk_radius2 = params.disk_fraction * size * size / np.pi
    disk = d2 <= disk_radius2
    disk_count = int(np.count_nonzero(disk))
    inner = d2 <= disk_radius2 * 0.36  # inner tone at 60% of the radius

    # Lesion: the N disk pixels nearest the center, N = round(fraction * disk).
    lesion = np.zeros_like(disk)
    lesion_target = int(round(params.lesion_fraction * disk_count))
    if lesion_target > 0:
        flat_d2 = d2.ravel()
        disk_flat = np.flatnonzero(disk.ravel())
        order = disk_flat[np.argsort(flat_d2[disk_flat], kind="stable")]
        lesion.ravel()[order[:lesion_target]] = True

    pixels = np.empty((size, size, 3), dtype=np.uint8)
    pixels[:, :] = params.bg_color
    pixels[disk] = params.leaf_color
    pixels[disk & inner] = params.leaf_color_inner

    if params.noise > 0:
        rng = np.random.default_rng(params.seed)
        jitter = rng.integers(
            -params.noise, params.noise + 1, size=pixels.shape, dtype=np.int64
        )
        healthy = disk & ~lesion
        noisy = np.clip(pixels.astype(np.int64) + jitter, 0, 255).astype(np.uint8)
        pixels[healthy] = noisy[healthy]

    pixels[lesion] = params.lesion_color

    return RgbImage(pixels), BinaryMask(disk), BinaryMask(lesion)
