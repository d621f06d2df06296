"""End-to-end leaf analysis: clip background, equalize, cluster, refine.

Stage order: Otsu-based background clipping on the gray image, per-channel
histogram equalization (histogram taken over leaf pixels), k-means
clustering of the equalized leaf pixels into faulty/normal, then an
iterative refinement that drops green pixels from the faulty candidates
and re-thresholds the remainder with Otsu until the mask stops changing.
The fault ratio is the faulty pixel count over the leaf pixel count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import ClusterModel, lloyd
from .errors import DegenerateHistogram, DimensionMismatch, NoLeafFound
from .histogram import Histogram, compute_histogram, equalize_rgb
from .imaging import BinaryMask, GrayImage, RgbImage, to_grayscale
from .threshold import binarize, otsu_threshold

BACKGROUND_MODES = ("border-majority", "lighter-class", "darker-class")
REFINE_KEEP_CHOICES = ("darker", "lighter")

# Refinement stop reasons recorded on SegmentationResult.
STOP_STABLE = "stable"
STOP_DEGENERATE = "degenerate-histogram"
STOP_MAX_ITERS = "max-iterations"


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable knobs for one analysis run; defaults mirror the CLI flags."""

    k: int = 2
    green_margin: float = 0.10
    max_refine_iters: int = 10
    kmeans_max_iters: int = 100
    kmeans_tol: float = 1e-6
    seed: int = 0
    background_mode: str = "border-majority"
    refine_keep: str = "darker"

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.max_refine_iters < 1:
            raise ValueError(f"max_refine_iters must be >= 1, got {self.max_refine_iters}")
        if self.green_margin < 0:
            raise ValueError(f"green_margin must be >= 0, got {self.green_margin}")
        if self.background_mode not in BACKGROUND_MODES:
            raise ValueError(f"unknown background_mode {self.background_mode!r}")
        if self.refine_keep not in REFINE_KEEP_CHOICES:
            raise ValueError(f"unknown refine_keep {self.refine_keep!r}")


@dataclass(frozen=True, eq=False)
class SegmentationResult:
    """Masks and metadata from one pipeline run.

    background, faulty and normal masks are pairwise disjoint and cover
    the frame; faulty and normal partition the leaf.  otsu_refine_threshold
    is None when no refinement Otsu ever succeeded (e.g. a single-level
    lesion), and refine_stop_reason records why the loop ended.
    """

    background_mask: BinaryMask
    leaf_mask: BinaryMask
    faulty_mask: BinaryMask
    normal_mask: BinaryMask
    otsu_background_threshold: int
    otsu_refine_threshold: int | None
    cluster_model: ClusterModel
    refine_iterations: int
    refine_stop_reason: str
    fault_ratio: float


def clip_background(
    image: RgbImage, config: PipelineConfig
) -> tuple[BinaryMask, BinaryMask]:
    """Split the frame into (background_mask, leaf_mask) via Otsu.

    The gray image is thresholded; which side is background depends on
    config.background_mode.  The default border-majority rule calls the
    class holding most border pixels the background (ties go to the
    lighter class).
    """
    gray = to_grayscale(image)
    result = otsu_threshold(compute_histogram(gray))
    above = binarize(gray, result.threshold)

    if config.background_mode == "lighter-class":
        background_bits = above.bits
    elif config.background_mode == "darker-class":
        background_bits = ~above.bits
    else:
        border = np.zeros_like(above.bits)
        border[0, :] = border[-1, :] = True
        border[:, 0] = border[:, -1] = True
        lighter_border = int(np.count_nonzero(above.bits & border))
        darker_border = int(np.count_nonzero(border)) - lighter_border
        background_bits = above.bits if lighter_border >= darker_border else ~above.bits

    leaf_bits = ~background_bits
    if not leaf_bits.any():
        raise NoLeafFound("background clipping left no leaf pixels")
    return BinaryMask(background_bits), BinaryMask(leaf_bits)


def is_green(pixel: tuple[int, int, int], margin: float) -> bool:
    """True when green exceeds both red and blue by the given margin."""
    r, g, b = (float(c) for c in pixel)
    return g > r * (1.0 + margin) and g > b * (1.0 + margin)


def green_mask(image: RgbImage, margin: float) -> BinaryMask:
    """Vectorized is_green over a whole image."""
    planes = image.pixels.astype(np.float64)
    r, g, b = planes[:, :, 0], planes[:, :, 1], planes[:, :, 2]
    return BinaryMask((g > r * (1.0 + margin)) & (g > b * (1.0 + margin)))


def segment_faulty(
    image: RgbImage,
    leaf_mask: BinaryMask,
    config: PipelineConfig,
    rng: np.random.Generator | None = None,
) -> SegmentationResult:
    """Split the leaf into faulty and normal regions.

    The equalized leaf pixels are clustered with k-means; the cluster whose
    center is least green-dominant (g - (r + b) / 2) seeds the faulty mask.
    Refinement then repeats: drop pixels that are green in the original
    image, Otsu-threshold the equalized grays of the remainder, and keep
    the darker class (configurable).  The loop stops when the mask is
    unchanged, when the candidate histogram degenerates (the candidates
    then stand as the faulty mask), or after max_refine_iters.
    """
    if (leaf_mask.height, leaf_mask.width) != (image.height, image.width):
        raise DimensionMismatch(
            f"mask {leaf_mask.width}x{leaf_mask.height} vs image "
            f"{image.width}x{image.height}"
        )
    if leaf_mask.count == 0:
        raise NoLeafFound("leaf mask is empty")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    background_threshold = otsu_threshold(compute_histogram(to_grayscale(image))).threshold

    equalized = equalize_rgb(image, mask=leaf_mask)
    features = equalized.pixels[leaf_mask.bits].astype(np.float64) / 255.0
    model = lloyd(
        features,
        config.k,
        rng,
        max_iters=config.kmeans_max_iters,
        tol=config.kmeans_tol,
    )

    centers = model.centers
    green_dominance = centers[:, 1] - (centers[:, 0] + centers[:, 2]) / 2.0
    faulty_cluster = int(np.argmin(green_dominance))

    faulty_bits = np.zeros(image.pixels.shape[:2], dtype=bool)
    faulty_bits[leaf_mask.bits] = model.labels == faulty_cluster

    equalized_gray = to_grayscale(equalized)
    green_bits = green_mask(image, config.green_margin).bits
    keep_darker = config.refine_keep == "darker"

    refine_threshold: int | None = None
    stop_reason = STOP_MAX_ITERS
    iterations = 0
    for _ in range(config.max_refine_iters):
        iterations += 1
        candidate_bits = faulty_bits & ~green_bits
        try:
            result = otsu_threshold(
                compute_histogram(equalized_gray, BinaryMask(candidate_bits))
            )
        except DegenerateHistogram:
            faulty_bits = candidate_bits
            stop_reason = STOP_DEGENERATE
            break
        refine_threshold = result.threshold
        above = equalized_gray.pixels > result.threshold
        new_bits = candidate_bits & (~above if keep_darker else above)
        if np.array_equal(new_bits, faulty_bits):
            stop_reason = STOP_STABLE
            break
        faulty_bits = new_bits

    normal_bits = leaf_mask.bits & ~faulty_bits
    faulty_count = int(np.count_nonzero(faulty_bits))
    return SegmentationResult(
        background_mask=BinaryMask(~leaf_mask.bits),
        leaf_mask=leaf_mask,
        faulty_mask=BinaryMask(faulty_bits),
        normal_mask=BinaryMask(normal_bits),
        otsu_background_threshold=background_threshold,
        otsu_refine_threshold=refine_threshold,
        cluster_model=model,
        refine_iterations=iterations,
        refine_stop_reason=stop_reason,
        fault_ratio=faulty_count / leaf_mask.count,
    )


def compute_fault_ratio(result: SegmentationResult) -> float:
    """Faulty pixel count over leaf pixel count."""
    leaf = result.leaf_mask.count
    if leaf < 1:
        raise NoLeafFound("leaf mask is empty")
    return result.faulty_mask.count / leaf


def emit_region_histograms(
    image: RgbImage, result: SegmentationResult
) -> tuple[Histogram, Histogram, Histogram]:
    """Gray histograms over the leaf, faulty and normal regions.

    Because faulty and normal partition the leaf, the first histogram is
    the bin-wise sum of the other two.
    """
    if (result.leaf_mask.height, result.leaf_mask.width) != (image.height, image.width):
        raise DimensionMismatch(
            f"result masks {result.leaf_mask.width}x{result.leaf_mask.height} "
            f"vs image {image.width}x{image.height}"
        )
    gray = to_grayscale(image)
    return (
        compute_histogram(gray, result.leaf_mask),
        compute_histogram(gray, result.faulty_mask),
        compute_histogram(gray, result.normal_mask),
    )


def run_pipeline(image: RgbImage, config: PipelineConfig) -> SegmentationResult:
    """Clip the background, then segment the leaf; one-call front end."""
    _, leaf_mask = clip_background(image, config)
    return segment_faulty(image, leaf_mask, config)
