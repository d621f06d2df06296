"""Leaf fault-area detection from single photographs."""

from .clustering import ClusterModel, assign, kmeanspp_seed, lloyd, update_centers
from .errors import (
    DegenerateHistogram,
    DimensionMismatch,
    InsufficientDistinctPoints,
    LeafscanError,
    MalformedImage,
    NoLeafFound,
    UnsupportedFormat,
)
from .histogram import (
    CumulativeHistogram,
    Histogram,
    compute_histogram,
    cumulative,
    equalize,
    equalize_rgb,
    histogram_csv,
)
from .imaging import (
    BinaryMask,
    GrayImage,
    RgbImage,
    decode_image,
    encode_image,
    overlay,
    to_grayscale,
)
from .pipeline import (
    PipelineConfig,
    SegmentationResult,
    clip_background,
    compute_fault_ratio,
    emit_region_histograms,
    green_mask,
    is_green,
    run_pipeline,
    segment_faulty,
)
from .synthetic import SyntheticLeafParams, generate_leaf
from .threshold import OtsuResult, binarize, otsu_threshold

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "ClusterModel",
    "CumulativeHistogram",
    "DegenerateHistogram",
    "DimensionMismatch",
    "GrayImage",
    "Histogram",
    "InsufficientDistinctPoints",
    "LeafscanError",
    "MalformedImage",
    "NoLeafFound",
    "OtsuResult",
    "PipelineConfig",
    "RgbImage",
    "SegmentationResult",
    "SyntheticLeafParams",
    "UnsupportedFormat",
    "assign",
    "binarize",
    "clip_background",
    "compute_fault_ratio",
    "compute_histogram",
    "cumulative",
    "decode_image",
    "emit_region_histograms",
    "encode_image",
    "equalize",
    "equalize_rgb",
    "generate_leaf",
    "green_mask",
    "histogram_csv",
    "is_green",
    "kmeanspp_seed",
    "lloyd",
    "otsu_threshold",
    "overlay",
    "run_pipeline",
    "segment_faulty",
    "to_grayscale",
    "update_centers",
]
