"""Dense optical flow between consecutive frames and flow-energy profiles.

The estimator is classic Horn-Schunck run coarse-to-fine over a small
Gaussian image pyramid. It is fully deterministic: fixed inputs and
parameters always produce bit-identical fields. The per-frame energy is
the squared flow magnitude summed over every pixel of the frame (no
square root, no region masking), so the profile tracks how much motion
each frame carries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError, LengthMismatchError, TooSmallError
from .frame_io import FlowField, Frame, FrameSequence

__all__ = [
    "FlowField",
    "FlowParams",
    "rgb_to_gray",
    "estimate_flow",
    "flow_energy",
    "energy_profile",
]

# Weighted 8-neighbour average used by the Horn-Schunck update; the centre
# weight is zero because the scheme averages the *neighbourhood* of (u, v).
_AVG_KERNEL = np.array(
    [
        [1 / 12, 1 / 6, 1 / 12],
        [1 / 6, 0.0, 1 / 6],
        [1 / 12, 1 / 6, 1 / 12],
    ]
)

_MIN_PYRAMID_DIM = 8  # don't downsample a level below this size


@dataclass(frozen=True)
class FlowParams:
    """Horn-Schunck tuning knobs.

    smoothness is the regularization weight (larger = smoother fields),
    iterations the fixed-point sweep count per pyramid level, and levels
    the maximum pyramid depth (small inputs use fewer levels).
    """

    smoothness: float = 15.0
    iterations: int = 100
    levels: int = 3

    def __post_init__(self) -> None:
        if not self.smoothness > 0:
            raise ValueError(f"smoothness must be positive, got {self.smoothness}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")


def rgb_to_gray(frame: Frame) -> np.ndarray:
    """Rec. 601 luma: 0.299 R + 0.587 G + 0.114 B, as float64 in [0, 255]."""
    px = frame.pixels.astype(np.float64)
    return 0.299 * px[:, :, 0] + 0.587 * px[:, :, 1] + 0.114 * px[:, :, 2]


def _derivatives(f1: np.ndarray, f2: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Forward-difference fx, fy, ft averaged over both frames, edges replicated."""
    a = np.pad(f1, ((0, 1), (0, 1)), mode="edge")
    b = np.pad(f2, ((0, 1), (0, 1)), mode="edge")
    fx = 0.25 * (
        (a[:-1, 1:] - a[:-1, :-1] + a[1:, 1:] - a[1:, :-1])
        + (b[:-1, 1:] - b[:-1, :-1] + b[1:, 1:] - b[1:, :-1])
    )
    fy = 0.25 * (
        (a[1:, :-1] - a[:-1, :-1] + a[1:, 1:] - a[:-1, 1:])
        + (b[1:, :-1] - b[:-1, :-1] + b[1:, 1:] - b[:-1, 1:])
    )
    ft = 0.25 * (
        (b[:-1, :-1] - a[:-1, :-1])
        + (b[:-1, 1:] - a[:-1, 1:])
        + (b[1:, :-1] - a[1:, :-1])
        + (b[1:, 1:] - a[1:, 1:])
    )
    return fx, fy, ft


def _iterate_level(
    f1: np.ndarray,
    f2: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    smoothness: float,
    iterations: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the Horn-Schunck fixed-point update for one pyramid level."""
    fx, fy, ft = _derivatives(f1, f2)
    denom = smoothness * smoothness + fx * fx + fy * fy
    for _ in range(iterations):
        u_bar = ndimage.correlate(u, _AVG_KERNEL, mode="nearest")
        v_bar = ndimage.correlate(v, _AVG_KERNEL, mode="nearest")
        scale = (fx * u_bar + fy * v_bar + ft) / denom
        u = u_bar - fx * scale
        v = v_bar - fy * scale
    return u, v


def _downsample(raster: np.ndarray) -> np.ndarray:
    """Gaussian blur (sigma 1) then drop every other row/column."""
    return ndimage.gaussian_filter(raster, 1.0, mode="nearest")[::2, ::2]


def _resize_bilinear(arr: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Bilinear resample with pixel centres aligned between grids."""
    h, w = arr.shape
    ht, wt = shape
    rows = (np.arange(ht) + 0.5) * (h / ht) - 0.5
    cols = (np.arange(wt) + 0.5) * (w / wt) - 0.5
    grid = np.meshgrid(rows, cols, indexing="ij")
    return ndimage.map_coordinates(arr, grid, order=1, mode="nearest")


def estimate_flow(
    prev: np.ndarray, next: np.ndarray, params: FlowParams | None = None
) -> FlowField:
    """Dense Horn-Schunck flow from `prev` to `next` luminance rasters.

    Coarse-to-fine over a Gaussian pyramid (up to params.levels levels;
    levels whose smaller side would drop below 8 px are skipped), with the
    flow zero-initialized at the coarsest level and upsampled/doubled
    between levels. Identical rasters, and uniform rasters of any two
    constants, both yield exactly zero flow because the zero field is a
    fixed point of the update there.

    Raises:
        DimensionMismatchError: the rasters differ in shape.
        TooSmallError: either side is below 2 pixels.
    """
    if params is None:
        params = FlowParams()
    f1 = np.asarray(prev, dtype=np.float64)
    f2 = np.asarray(next, dtype=np.float64)
    if f1.ndim != 2 or f2.ndim != 2 or f1.shape != f2.shape:
        raise DimensionMismatchError(
            f"rasters must be 2-D and equal-shaped, got {f1.shape} and {f2.shape}"
        )
    if min(f1.shape) < 2:
        raise TooSmallError(f"rasters must be at least 2x2, got {f1.shape}")

    pyramid = [(f1, f2)]
    for _ in range(params.levels - 1):
        top1, top2 = pyramid[-1]
        if min(top1.shape) < _MIN_PYRAMID_DIM:
            break
        pyramid.append((_downsample(top1), _downsample(top2)))

    u = np.zeros(pyramid[-1][0].shape)
    v = np.zeros_like(u)
    for level in range(len(pyramid) - 1, -1, -1):
        lf1, lf2 = pyramid[level]
        if u.shape != lf1.shape:
            u = _resize_bilinear(u, lf1.shape) * 2.0
            v = _resize_bilinear(v, lf1.shape) * 2.0
        u, v = _iterate_level(lf1, lf2, u, v, params.smoothness, params.iterations)
    return FlowField(u=u, v=v)


def flow_energy(field: FlowField) -> float:
    """Sum of u^2 + v^2 over every pixel of the field (no square root)."""
    return float(np.sum(field.u * field.u + field.v * field.v))


def energy_profile(
    seq: FrameSequence,
    params: FlowParams | None = None,
    external: Sequence[FlowField] | None = None,
) -> np.ndarray:
    """Per-frame flow energies for a sequence, as a length-n float vector.

    Entry i (0-based) is the energy of the flow from frame i to frame i+1;
    the final frame has no successor and repeats the previous energy. A
    single-frame sequence gets the profile [0.0].

    Precomputed fields (e.g. from a stronger external estimator) can be
    passed as `external`; exactly n - 1 of them are required and their
    dimensions must match the frames.
    """
    n = len(seq)
    if n == 1:
        return np.zeros(1)
    if external is not None:
        if len(external) != n - 1:
            raise LengthMismatchError(
                f"need {n - 1} precomputed fields for {n} frames, got {len(external)}"
            )
        for k, field in enumerate(external):
            if (field.width, field.height) != (seq.width, seq.height):
                raise DimensionMismatchError(
                    f"field {k} is {field.width}x{field.height}, "
                    f"frames are {seq.width}x{seq.height}"
                )
        energies = [flow_energy(field) for field in external]
    else:
        grays = [rgb_to_gray(frame) for frame in seq]
        energies = [
            flow_energy(estimate_flow(grays[i], grays[i + 1], params))
            for i in range(n - 1)
        ]
    energies.append(energies[-1])
    return np.asarray(energies, dtype=np.float64)
