"""Exception types raised by the flowpool library.

Plain OS-level failures (unwritable paths, missing directories) surface as
the builtin ``OSError`` family; everything domain-specific derives from
:class:`FlowPoolError` so callers can catch one base type.
"""


class FlowPoolError(Exception):
    """Base class for all flowpool domain errors."""


class EmptyDirectoryError(FlowPoolError):
    """A frame directory contained no matching image files."""


class DimensionMismatchError(FlowPoolError):
    """Rasters that must share dimensions do not."""


class DecodeError(FlowPoolError):
    """An image file could not be decoded (corrupt or unsupported format)."""


class BadMagicError(FlowPoolError):
    """A flow file does not start with the expected magic value."""


class TruncatedFileError(FlowPoolError):
    """A flow file ended before the declared payload was complete."""


class TooSmallError(FlowPoolError):
    """An input raster is below the minimum size the operation supports."""


class TooShortError(FlowPoolError):
    """A frame sequence has fewer frames than the pooling method needs."""


class LengthMismatchError(FlowPoolError):
    """A vector argument has the wrong length for the given matrix/raster."""


class InvalidRankError(FlowPoolError):
    """A top-r weight configuration has r outside [1, n]."""


class SingularSystemError(FlowPoolError):
    """The unregularized frame Gram system is numerically singular."""


class NoConvergenceError(FlowPoolError):
    """An iterative solve hit its iteration cap before reaching tolerance."""


class MissingFlowError(FlowPoolError):
    """A precomputed flow directory is missing one of the expected files."""
