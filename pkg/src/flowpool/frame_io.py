"""Frame-sequence loading, centering, and raster/flow file I/O.

Frames are 8-bit RGB rasters. A frame is vectorized in row-major pixel
order with interleaved RGB channels, so entry ``(y * width + x) * 3 + c``
holds channel ``c`` of pixel ``(x, y)``. All pooling maths in this package
relies on that fixed order.

Flow fields are exchanged with external tools through the common ``.flo``
layout: a little-endian float32 magic value 202021.25, int32 width and
height, then ``width * height`` interleaved (u, v) float32 pairs in
row-major order.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from fnmatch import fnmatchcase
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from PIL import Image

from .errors import (
    BadMagicError,
    DecodeError,
    DimensionMismatchError,
    EmptyDirectoryError,
    TruncatedFileError,
)

FLO_MAGIC = 202021.25
_SUPPORTED_FORMATS = ("PNG", "PPM")


@dataclass(frozen=True, eq=False)
class Frame:
    """One 8-bit RGB raster, stored as a (height, width, 3) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = self.pixels
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"frame pixels must have shape (h, w, 3), got {px.shape}")
        if px.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {px.dtype}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("frame must be at least 1x1")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def vectorized(self) -> np.ndarray:
        """Flatten to float64 in row-major, RGB-interleaved order."""
        return self.pixels.astype(np.float64).reshape(-1)


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Temporally ordered frames sharing one width/height."""

    frames: tuple[Frame, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.frames, tuple):
            object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) < 1:
            raise ValueError("a frame sequence needs at least one frame")
        first = self.frames[0]
        for i, frame in enumerate(self.frames):
            if (frame.width, frame.height) != (first.width, first.height):
                raise DimensionMismatchError(
                    f"frame {i} is {frame.width}x{frame.height}, "
                    f"expected {first.width}x{first.height}"
                )

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    def __getitem__(self, index: int) -> Frame:
        return self.frames[index]

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def stack(self) -> np.ndarray:
        """All frames as one float64 array of shape (n, height, width, 3)."""
        return np.stack([f.pixels for f in self.frames]).astype(np.float64)


@dataclass(frozen=True, eq=False)
class MeanFrame:
    """Per-pixel, per-channel arithmetic mean of a sequence, kept real-valued.

    Rounding this to 8 bits would break the exact cancellation that makes
    centered frame rows sum to zero, so it stays float64.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 3 or self.values.shape[2] != 3:
            raise ValueError(f"mean frame must have shape (h, w, 3), got {self.values.shape}")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def vectorized(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64).reshape(-1)


@dataclass(frozen=True, eq=False)
class CenteredFrameMatrix:
    """Stacked mean-subtracted frame vectors, one row per frame.

    Row i is the vectorized difference between frame i and the sequence
    mean; the rows therefore sum to (numerically) zero.
    """

    rows: np.ndarray
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.rows.ndim != 2:
            raise ValueError("rows must be a 2-D array")
        if self.rows.shape[1] != 3 * self.width * self.height:
            raise ValueError(
                f"row length {self.rows.shape[1]} does not match "
                f"3 * {self.width} * {self.height}"
            )

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True, eq=False)
class FlowField:
    """Dense per-pixel displacement field between two rasters.

    ``u`` holds the horizontal and ``v`` the vertical displacement in
    pixels; both are (height, width) arrays of finite values.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        if self.u.ndim != 2 or self.u.shape != self.v.shape:
            raise ValueError(
                f"u and v must be 2-D arrays of equal shape, got {self.u.shape} / {self.v.shape}"
            )
        if not (np.isfinite(self.u).all() and np.isfinite(self.v).all()):
            raise ValueError("flow components must all be finite")

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def height(self) -> int:
        return self.u.shape[0]


def load_frame_dir(path: str | Path, pattern: str | None = None) -> FrameSequence:
    """Load a directory of PNG / binary-PPM frames as one sequence.

    Files are ordered by byte-wise lexicographic filename comparison, which
    is deterministic and independent of how the filesystem enumerates
    entries (zero-pad frame indices to get numeric order). Without a
    ``pattern`` glob, every ``*.png`` / ``*.ppm`` file is taken.

    Raises:
        EmptyDirectoryError: no file matched.
        DecodeError: a matched file is corrupt or not PNG/PPM.
        DimensionMismatchError: frames differ in size.
    """
    root = Path(path)
    names = [entry.name for entry in os.scandir(root) if entry.is_file()]
    if pattern is not None:
        names = [n for n in names if fnmatchcase(n, pattern)]
    else:
        names = [n for n in names if n.lower().endswith((".png", ".ppm"))]
    names.sort(key=os.fsencode)
    if not names:
        raise EmptyDirectoryError(f"no frame files in {root}" + (f" matching {pattern!r}" if pattern else ""))

    frames: list[Frame] = []
    for name in names:
        file_path = root / name
        try:
            with Image.open(file_path) as image:
                if image.format not in _SUPPORTED_FORMATS:
                    raise DecodeError(f"{name}: unsupported format {image.format!r} (want PNG or PPM)")
                rgb = image.convert("RGB")
                pixels = np.asarray(rgb, dtype=np.uint8)
        except DecodeError:
            raise
        except (OSError, SyntaxError, ValueError) as exc:
            raise DecodeError(f"cannot decode {name}: {exc}") from exc
        frame = Frame(pixels)
        if frames and (frame.width, frame.height) != (frames[0].width, frames[0].height):
            raise DimensionMismatchError(
                f"{name} is {frame.width}x{frame.height}, expected "
                f"{frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)
    return FrameSequence(tuple(frames))


def compute_mean_frame(seq: FrameSequence) -> MeanFrame:
    """Per-pixel, per-channel mean over the sequence, in real arithmetic."""
    return MeanFrame(seq.stack().mean(axis=0))


def center_frames(seq: FrameSequence, mean: MeanFrame) -> CenteredFrameMatrix:
    """Subtract the mean frame from every frame and stack the row vectors."""
    if (mean.width, mean.height) != (seq.width, seq.height):
        raise DimensionMismatchError(
            f"mean frame is {mean.width}x{mean.height}, sequence is {seq.width}x{seq.height}"
        )
    rows = seq.stack().reshape(len(seq), -1) - mean.vectorized()
    return CenteredFrameMatrix(rows=rows, width=seq.width, height=seq.height)


def write_summary_png(img: Frame, path: str | Path) -> None:
    """Write an 8-bit RGB PNG (no alpha); decoding it returns identical pixels."""
    Image.fromarray(img.pixels, mode="RGB").save(Path(path), format="PNG")


def read_flo(path: str | Path) -> FlowField:
    """Read a ``.flo`` flow file (layout documented in the module docstring).

    Raises:
        BadMagicError: the leading float32 is not 202021.25.
        TruncatedFileError: header or payload is incomplete.
    """
    data = Path(path).read_bytes()
    if len(data) < 4:
        raise TruncatedFileError(f"{path}: shorter than the 4-byte magic")
    (magic,) = struct.unpack_from("<f", data, 0)
    if magic != np.float32(FLO_MAGIC):
        raise BadMagicError(f"{path}: magic {magic!r} != {FLO_MAGIC}")
    if len(data) < 12:
        raise TruncatedFileError(f"{path}: missing width/height header")
    width, height = struct.unpack_from("<ii", data, 4)
    if width < 1 or height < 1:
        raise TruncatedFileError(f"{path}: implausible dimensions {width}x{height}")
    expected = 12 + 8 * width * height
    if len(data) < expected:
        raise TruncatedFileError(f"{path}: {len(data)} bytes, expected {expected}")
    pairs = np.frombuffer(data, dtype="<f4", count=2 * width * height, offset=12)
    uv = pairs.reshape(height, width, 2)
    return FlowField(u=uv[:, :, 0].copy(), v=uv[:, :, 1].copy())


def write_flo(field: FlowField, path: str | Path) -> None:
    """Write a flow field in ``.flo`` layout; round-trips bit-exactly."""
    uv = np.empty((field.height, field.width, 2), dtype="<f4")
    uv[:, :, 0] = field.u
    uv[:, :, 1] = field.v
    with open(path, "wb") as fh:
        fh.write(struct.pack("<f", FLO_MAGIC))
        fh.write(struct.pack("<ii", field.width, field.height))
        fh.write(uv.tobytes())


def frame_paths(directory: str | Path, pattern: str | None = None) -> Sequence[Path]:
    """Matched frame file paths in load order (mainly for diagnostics)."""
    root = Path(directory)
    names = [entry.name for entry in os.scandir(root) if entry.is_file()]
    if pattern is not None:
        names = [n for n in names if fnmatchcase(n, pattern)]
    else:
        names = [n for n in names if n.lower().endswith((".png", ".ppm"))]
    names.sort(key=os.fsencode)
    return [root / n for n in names]
