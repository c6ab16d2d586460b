"""Frame loading, centering, and raster/flow file format behavior."""

from __future__ import annotations

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from flowpool import (
    BadMagicError,
    DecodeError,
    DimensionMismatchError,
    EmptyDirectoryError,
    FlowField,
    Frame,
    FrameSequence,
    TruncatedFileError,
    center_frames,
    compute_mean_frame,
    load_frame_dir,
    read_flo,
    write_flo,
    write_summary_png,
)


def _solid(w, h, r, g=0, b=0):
    px = np.zeros((h, w, 3), dtype=np.uint8)
    px[:, :, 0] = r
    px[:, :, 1] = g
    px[:, :, 2] = b
    return Frame(px)


# ---------------------------------------------------------------- loading


def test_load_dir_orders_by_filename_bytes(tmp_path):
    # written out of order on purpose; load order must be a/b regardless
    write_summary_png(_solid(2, 2, 20), tmp_path / "b.png")
    write_summary_png(_solid(2, 2, 10), tmp_path / "a.png")
    seq = load_frame_dir(tmp_path)
    assert len(seq) == 2
    assert seq[0].pixels[0, 0, 0] == 10
    assert seq[1].pixels[0, 0, 0] == 20


def test_load_dir_empty_raises(tmp_path):
    with pytest.raises(EmptyDirectoryError):
        load_frame_dir(tmp_path)


def test_load_dir_mixed_sizes_raises(tmp_path):
    write_summary_png(_solid(2, 2, 1), tmp_path / "a.png")
    write_summary_png(_solid(4, 4, 2), tmp_path / "b.png")
    with pytest.raises(DimensionMismatchError):
        load_frame_dir(tmp_path)


def test_load_dir_pattern_filters(tmp_path):
    write_summary_png(_solid(2, 2, 5), tmp_path / "frame_01.png")
    write_summary_png(_solid(2, 2, 9), tmp_path / "other.png")
    seq = load_frame_dir(tmp_path, pattern="frame_*.png")
    assert len(seq) == 1
    assert seq[0].pixels[0, 0, 0] == 5


def test_load_dir_corrupt_file_raises(tmp_path):
    (tmp_path / "bad.png").write_bytes(b"this is not a png at all")
    with pytest.raises(DecodeError):
        load_frame_dir(tmp_path)


def test_load_dir_reads_binary_ppm(tmp_path):
    img = Image.fromarray(np.full((3, 4, 3), 200, dtype=np.uint8), mode="RGB")
    img.save(tmp_path / "f.ppm")  # Pillow writes P6 for RGB
    seq = load_frame_dir(tmp_path)
    assert (seq.width, seq.height) == (4, 3)
    assert np.all(seq[0].pixels == 200)


def test_load_dir_rejects_other_formats(tmp_path):
    Image.fromarray(np.zeros((2, 2, 3), dtype=np.uint8), mode="RGB").save(
        tmp_path / "f.png.bmp", format="BMP"
    )
    with pytest.raises(DecodeError):
        load_frame_dir(tmp_path, pattern="*.bmp")


# ------------------------------------------------------------- centering


def test_mean_of_two_point_values():
    seq = FrameSequence((_solid(1, 1, 10), _solid(1, 1, 20)))
    mean = compute_mean_frame(seq)
    assert mean.values[0, 0, 0] == 15.0


def test_mean_of_single_frame_is_identity(random_clip):
    seq = random_clip(1, 4, 4, seed=5)
    mean = compute_mean_frame(seq)
    assert np.array_equal(mean.values, seq[0].pixels.astype(np.float64))


def test_mean_matches_per_pixel_accumulation(random_clip):
    seq = random_clip(100, 4, 4, seed=6)
    mean = compute_mean_frame(seq)
    # independent accumulation, one pixel at a time
    acc = np.zeros((4, 4, 3))
    for frame in seq:
        for yy in range(4):
            for xx in range(4):
                for c in range(3):
                    acc[yy, xx, c] += frame.pixels[yy, xx, c]
    acc /= len(seq)
    assert np.max(np.abs(mean.values - acc)) < 1e-9


def test_center_single_frame_gives_zero_row(random_clip):
    seq = random_clip(1, 3, 3, seed=7)
    mat = center_frames(seq, compute_mean_frame(seq))
    assert mat.n == 1
    assert np.all(mat.rows == 0.0)


def test_center_two_frames_antisymmetric():
    seq = FrameSequence((_solid(1, 1, 10), _solid(1, 1, 20)))
    mat = center_frames(seq, compute_mean_frame(seq))
    assert mat.rows[0, 0] == -5.0
    assert mat.rows[1, 0] == 5.0


def test_center_row_sum_is_tiny(random_clip):
    seq = random_clip(7, 6, 5, seed=8)
    mat = center_frames(seq, compute_mean_frame(seq))
    assert np.max(np.abs(mat.rows.sum(axis=0))) < 1e-6


def test_center_reconstructs_frames(random_clip):
    seq = random_clip(5, 4, 4, seed=9)
    mean = compute_mean_frame(seq)
    mat = center_frames(seq, mean)
    for i, frame in enumerate(seq):
        rebuilt = mat.rows[i] + mean.vectorized()
        assert np.max(np.abs(rebuilt - frame.vectorized())) < 1e-9


def test_center_dimension_mismatch(random_clip):
    seq = random_clip(3, 4, 4, seed=10)
    other = compute_mean_frame(random_clip(2, 5, 4, seed=10))
    with pytest.raises(DimensionMismatchError):
        center_frames(seq, other)


def test_vectorization_is_row_major_rgb_interleaved():
    px = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(3, 2, 3)  # h=3, w=2
    vec = Frame(px).vectorized()
    for yy in range(3):
        for xx in range(2):
            for c in range(3):
                assert vec[(yy * 2 + xx) * 3 + c] == px[yy, xx, c]


# ------------------------------------------------------------ PNG output


def test_png_round_trip_bit_exact(tmp_path, random_clip):
    frame = random_clip(1, 9, 7, seed=11)[0]
    out = tmp_path / "img.png"
    write_summary_png(frame, out)
    back = load_frame_dir(tmp_path)[0]
    assert np.array_equal(back.pixels, frame.pixels)


def test_png_single_pixel_values(tmp_path):
    frame = Frame(np.array([[[0, 128, 255]]], dtype=np.uint8))
    write_summary_png(frame, tmp_path / "p.png")
    back = load_frame_dir(tmp_path)[0]
    assert tuple(back.pixels[0, 0]) == (0, 128, 255)


def test_png_unwritable_path_raises(tmp_path):
    frame = _solid(2, 2, 1)
    with pytest.raises(OSError):
        write_summary_png(frame, tmp_path / "no" / "such" / "dir" / "x.png")


# ------------------------------------------------------------- .flo files


def test_flo_round_trip_bit_exact(tmp_path, rng):
    u = rng.standard_normal((5, 7)).astype(np.float32).astype(np.float64)
    v = rng.standard_normal((5, 7)).astype(np.float32).astype(np.float64)
    path = tmp_path / "f.flo"
    write_flo(FlowField(u=u, v=v), path)
    back = read_flo(path)
    assert np.array_equal(back.u.astype(np.float32), u.astype(np.float32))
    assert np.array_equal(back.v.astype(np.float32), v.astype(np.float32))


def test_flo_known_single_pixel_layout(tmp_path):
    path = tmp_path / "one.flo"
    write_flo(FlowField(u=np.array([[1.5]]), v=np.array([[-2.0]])), path)
    data = path.read_bytes()
    expected = struct.pack("<f", 202021.25) + struct.pack("<ii", 1, 1)
    expected += struct.pack("<ff", 1.5, -2.0)
    assert len(data) == 20
    assert data == expected


def test_flo_bad_magic(tmp_path):
    path = tmp_path / "bad.flo"
    path.write_bytes(struct.pack("<f", 123.0) + struct.pack("<ii", 1, 1) + b"\0" * 8)
    with pytest.raises(BadMagicError):
        read_flo(path)


def test_flo_truncated_header(tmp_path):
    path = tmp_path / "short.flo"
    path.write_bytes(struct.pack("<f", 202021.25) + b"\x01")
    with pytest.raises(TruncatedFileError):
        read_flo(path)


def test_flo_truncated_payload(tmp_path):
    path = tmp_path / "cut.flo"
    path.write_bytes(struct.pack("<f", 202021.25) + struct.pack("<ii", 4, 4) + b"\0" * 10)
    with pytest.raises(TruncatedFileError):
        read_flo(path)


@settings(max_examples=25, deadline=None)
@given(
    w=st.integers(1, 6),
    h=st.integers(1, 6),
    seed=st.integers(0, 2**31 - 1),
)
def test_flo_round_trip_property(tmp_path_factory, w, h, seed):
    gen = np.random.default_rng(seed)
    u = (gen.standard_normal((h, w)) * 100).astype(np.float32)
    v = (gen.standard_normal((h, w)) * 100).astype(np.float32)
    path = tmp_path_factory.mktemp("flo") / "x.flo"
    write_flo(FlowField(u=u.astype(np.float64), v=v.astype(np.float64)), path)
    back = read_flo(path)
    assert np.array_equal(back.u.astype(np.float32), u)
    assert np.array_equal(back.v.astype(np.float32), v)


def test_flow_field_rejects_non_finite():
    with pytest.raises(ValueError):
        FlowField(u=np.array([[np.nan]]), v=np.array([[0.0]]))


def test_frame_sequence_rejects_mixed_sizes():
    with pytest.raises(DimensionMismatchError):
        FrameSequence((_solid(2, 2, 0), _solid(3, 2, 0)))
