"""Exception types raised across the package."""


class LeafscanError(Exception):
    """Base class for all leafscan-specific failures."""


class MalformedImage(LeafscanError):
    """Image stream is structurally invalid (bad header, truncated payload)."""


class UnsupportedFormat(LeafscanError):
    """Image format or variant is recognised but not supported."""


class DimensionMismatch(LeafscanError):
    """Two grids that must share dimensions do not."""


class DegenerateHistogram(LeafscanError):
    """Histogram has fewer than two occupied levels; no threshold exists."""


class InsufficientDistinctPoints(LeafscanError):
    """Fewer distinct points than requested clusters."""


class NoLeafFound(LeafscanError):
    """Segmentation produced an empty leaf region."""
