"""flowpool: collapse a video frame sequence into one summary image.

The main entry points are `energy_profile` (per-frame optical-flow
energies), `flow_profile_image` / `flow_profile_image_exact` (the
flow-weighted poolers), and the baseline poolers `dynamic_image`,
`eigen_image`, `mean_image`, `max_image`. The `flowpool` console script
wraps the same pipeline for batch use.
"""

from .errors import (
    BadMagicError,
    DecodeError,
    DimensionMismatchError,
    EmptyDirectoryError,
    FlowPoolError,
    InvalidRankError,
    LengthMismatchError,
    MissingFlowError,
    NoConvergenceError,
    SingularSystemError,
    TooShortError,
    TooSmallError,
    TruncatedFileError,
)
from .frame_io import (
    CenteredFrameMatrix,
    FlowField,
    Frame,
    FrameSequence,
    MeanFrame,
    center_frames,
    compute_mean_frame,
    load_frame_dir,
    read_flo,
    write_flo,
    write_summary_png,
)
from .optical_flow import (
    FlowParams,
    energy_profile,
    estimate_flow,
    flow_energy,
    rgb_to_gray,
)
from .pooling import (
    ExactPoolResult,
    RankRConfig,
    dynamic_coefficients,
    dynamic_image,
    eigen_image,
    eigen_pool_vector,
    flow_profile_image,
    flow_profile_image_exact,
    fpi_exact,
    fpi_weights,
    max_image,
    mean_image,
    rescale_to_image,
    weighted_sum,
)
from .cache import FlowCache, flow_cache_key
from .pipeline import JobSpec, PoolOutcome, run_pool_job

__version__ = "0.1.0"

__all__ = [
    "BadMagicError",
    "CenteredFrameMatrix",
    "DecodeError",
    "DimensionMismatchError",
    "EmptyDirectoryError",
    "ExactPoolResult",
    "FlowCache",
    "FlowField",
    "FlowParams",
    "FlowPoolError",
    "Frame",
    "FrameSequence",
    "InvalidRankError",
    "JobSpec",
    "LengthMismatchError",
    "MeanFrame",
    "MissingFlowError",
    "NoConvergenceError",
    "PoolOutcome",
    "RankRConfig",
    "SingularSystemError",
    "TooShortError",
    "TooSmallError",
    "TruncatedFileError",
    "center_frames",
    "compute_mean_frame",
    "dynamic_coefficients",
    "dynamic_image",
    "eigen_image",
    "eigen_pool_vector",
    "energy_profile",
    "estimate_flow",
    "flow_cache_key",
    "flow_energy",
    "flow_profile_image",
    "flow_profile_image_exact",
    "fpi_exact",
    "fpi_weights",
    "load_frame_dir",
    "max_image",
    "mean_image",
    "read_flo",
    "rescale_to_image",
    "rgb_to_gray",
    "run_pool_job",
    "weighted_sum",
    "write_flo",
    "write_summary_png",
]
