"""Shared fixtures: synthetic clips, flow fixtures, and disk writers."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from flowpool import Frame, FrameSequence, write_summary_png


def _random_frames(rng: np.random.Generator, n: int, w: int, h: int) -> list[Frame]:
    return [
        Frame(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)) for _ in range(n)
    ]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture
def random_clip():
    """Factory: random uint8 clip of n frames, w x h, from a fixed seed."""

    def make(n: int, w: int = 8, h: int = 8, seed: int = 0) -> FrameSequence:
        gen = np.random.default_rng(seed)
        return FrameSequence(tuple(_random_frames(gen, n, w, h)))

    return make


@pytest.fixture
def identical_clip():
    """Factory: n copies of one constant frame (a motionless clip)."""

    def make(n: int, w: int = 8, h: int = 8, value: int = 77) -> FrameSequence:
        frame = Frame(np.full((h, w, 3), value, dtype=np.uint8))
        return FrameSequence(tuple(frame for _ in range(n)))

    return make


def _square_frame(
    background: np.ndarray, x: int, y: int, side: int, value: int
) -> Frame:
    pixels = background.copy()
    pixels[y : y + side, x : x + side, :] = value
    return Frame(pixels)


@pytest.fixture
def moving_square_clip():
    """Bright square sliding over a static textured background.

    The step sizes vary, so one frame pair carries clearly more motion
    energy than the others; positions() reports where the square sits in
    each frame for region-based assertions.
    """

    def make(
        size: int = 48,
        side: int = 10,
        xs: tuple[int, ...] = (2, 6, 16, 20, 24),
        y: int = 8,
        seed: int = 11,
    ):
        gen = np.random.default_rng(seed)
        background = gen.integers(0, 120, size=(size, size, 3), dtype=np.uint8)
        frames = tuple(_square_frame(background, x, y, side, 255) for x in xs)
        return FrameSequence(frames), [(x, y, side) for x in xs]

    return make


@pytest.fixture
def gaussian_blob_pair():
    """Two 64x64 luminance rasters: a smooth blob shifted by (1, 0) px."""

    def blob(cx: float, cy: float, size: int = 64, sigma: float = 8.0) -> np.ndarray:
        y, x = np.mgrid[0:size, 0:size].astype(np.float64)
        return 200.0 * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * sigma * sigma))

    return blob(31.5, 31.5), blob(32.5, 31.5)


@pytest.fixture
def clip_to_dir(tmp_path):
    """Factory: write a clip's frames as zero-padded PNGs into a new dir."""

    counter = {"n": 0}

    def write(seq: FrameSequence, name: str | None = None) -> Path:
        if name is None:
            counter["n"] += 1
            name = f"clip{counter['n']:02d}"
        directory = tmp_path / name
        directory.mkdir(parents=True)
        for i, frame in enumerate(seq):
            write_summary_png(frame, directory / f"frame_{i:04d}.png")
        return directory

    return write
