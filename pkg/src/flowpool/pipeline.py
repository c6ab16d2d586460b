"""Single-sequence jobs: load frames, obtain flows, pool, write the PNG.

A job is described by a JobSpec — either built from parsed command-line
flags or from one manifest line of space-separated `key=value` pairs.
Everything a job does is deterministic, so running the same spec twice
(or under different batch parallelism) produces byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from . import optical_flow
from .cache import FlowCache, flow_cache_key
from .errors import MissingFlowError
from .frame_io import (
    FlowField,
    FrameSequence,
    load_frame_dir,
    read_flo,
    write_summary_png,
)
from .optical_flow import FlowParams, energy_profile
from .pooling import (
    RankRConfig,
    dynamic_image,
    eigen_image,
    flow_profile_image,
    flow_profile_image_exact,
    max_image,
    mean_image,
)

METHODS = ("fpi", "fpi-exact", "dynamic", "eigen", "mean", "max")
FLOW_FILE_FORMAT = "flow_{:06d}.flo"


@dataclass(frozen=True)
class JobSpec:
    """One pooling job: where the frames are, how to pool, where to write."""

    input_dir: str
    output: str
    method: str
    rank_r: int | None = None
    high: float = 1.0
    low: float = 0.0
    smoothness: float = 15.0
    iterations: int = 100
    levels: int = 3
    flow_dir: str | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r}; choose one of {', '.join(METHODS)}"
            )
        if self.rank_r is not None and self.method not in ("fpi", "fpi-exact"):
            raise ValueError(f"rank applies only to fpi/fpi-exact, not {self.method}")

    def flow_params(self) -> FlowParams:
        return FlowParams(
            smoothness=self.smoothness, iterations=self.iterations, levels=self.levels
        )

    def rank_config(self) -> RankRConfig | None:
        if self.rank_r is None:
            return None
        return RankRConfig(r=self.rank_r, high=self.high, low=self.low)


_MANIFEST_KEYS = {
    "input": ("input_dir", str),
    "output": ("output", str),
    "method": ("method", str),
    "r": ("rank_r", int),
    "high": ("high", float),
    "low": ("low", float),
    "smoothness": ("smoothness", float),
    "iterations": ("iterations", int),
    "levels": ("levels", int),
    "flow_dir": ("flow_dir", str),
}
_REQUIRED_KEYS = ("input", "output", "method")


def parse_manifest_line(line: str) -> JobSpec:
    """Build a JobSpec from one `key=value key=value ...` manifest line.

    Raises ValueError on unknown keys, unparsable values, or missing
    required keys (input, output, method).
    """
    assignments: dict[str, object] = {}
    seen: set[str] = set()
    for token in line.split():
        key, eq, value = token.partition("=")
        if not eq or not key:
            raise ValueError(f"expected key=value, got {token!r}")
        if key not in _MANIFEST_KEYS:
            raise ValueError(f"unknown manifest key {key!r}")
        if key in seen:
            raise ValueError(f"duplicate manifest key {key!r}")
        seen.add(key)
        field_name, converter = _MANIFEST_KEYS[key]
        try:
            assignments[field_name] = converter(value)
        except ValueError as exc:
            raise ValueError(f"bad value for {key!r}: {value!r}") from exc
    missing = [k for k in _REQUIRED_KEYS if _MANIFEST_KEYS[k][0] not in assignments]
    if missing:
        raise ValueError(f"missing required key(s): {', '.join(missing)}")
    return JobSpec(**assignments)  # type: ignore[arg-type]


def iter_manifest(path: str | Path) -> Iterator[tuple[int, str]]:
    """Yield (line number, stripped text) for each non-blank, non-comment line."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, stripped


def _quantize(field: FlowField) -> FlowField:
    """Round a field to float32, the precision of the flow file format."""
    return FlowField(
        u=field.u.astype(np.float32).astype(np.float64),
        v=field.v.astype(np.float32).astype(np.float64),
    )


def compute_pair_flows(
    seq: FrameSequence,
    params: FlowParams,
    cache: FlowCache | None = None,
) -> list[FlowField]:
    """Flow fields for all n - 1 consecutive pairs, using the cache if given.

    Freshly estimated fields are rounded to float32 before use — the same
    precision a cache entry or `.flo` file carries — so downstream results
    are identical whether a field was just computed, replayed from the
    cache, or read back from disk.
    """
    flows: list[FlowField] = []
    for i in range(len(seq) - 1):
        prev, nxt = seq[i], seq[i + 1]
        key = flow_cache_key(prev, nxt, params) if cache is not None else None
        field = cache.get(key) if cache is not None else None
        if field is None:
            field = _quantize(
                optical_flow.estimate_flow(
                    optical_flow.rgb_to_gray(prev),
                    optical_flow.rgb_to_gray(nxt),
                    params,
                )
            )
            if cache is not None and key is not None:
                cache.put(key, field)
        flows.append(field)
    return flows


def read_flow_dir(path: str | Path, n_frames: int) -> list[FlowField]:
    """Read the n - 1 precomputed fields flow_000001.flo ... from a directory.

    Raises:
        MissingFlowError: a numbered file in the run is absent.
    """
    root = Path(path)
    flows: list[FlowField] = []
    for i in range(1, n_frames):
        flo_path = root / FLOW_FILE_FORMAT.format(i)
        if not flo_path.is_file():
            raise MissingFlowError(f"missing flow file for pair {i}: {flo_path}")
        flows.append(read_flo(flo_path))
    return flows


@dataclass(frozen=True)
class PoolOutcome:
    """What a finished pool job produced."""

    output: str
    max_residual: float | None = None


def run_pool_job(job: JobSpec, cache: FlowCache | None = None) -> PoolOutcome:
    """Execute one pooling job end to end and write its summary PNG."""
    seq = load_frame_dir(job.input_dir)
    max_residual: float | None = None

    if job.method in ("fpi", "fpi-exact"):
        profile = profile_for_sequence(seq, job.flow_params(), job.flow_dir, cache)
        if job.method == "fpi":
            image = flow_profile_image(seq, profile, job.rank_config())
        else:
            image, result = flow_profile_image_exact(seq, profile, job.rank_config())
            max_residual = result.max_abs_residual
    elif job.method == "dynamic":
        image = dynamic_image(seq)
    elif job.method == "eigen":
        image = eigen_image(seq)
    elif job.method == "mean":
        image = mean_image(seq)
    else:
        image = max_image(seq)

    out_path = Path(job.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_summary_png(image, out_path)
    return PoolOutcome(output=str(out_path), max_residual=max_residual)


def profile_for_sequence(
    seq: FrameSequence,
    params: FlowParams,
    flow_dir: str | Path | None = None,
    cache: FlowCache | None = None,
) -> np.ndarray:
    """Energy profile from precomputed fields if given, else estimated flows."""
    if len(seq) == 1:
        return energy_profile(seq)
    if flow_dir is not None:
        flows = read_flow_dir(flow_dir, len(seq))
    else:
        flows = compute_pair_flows(seq, params, cache)
    return energy_profile(seq, external=flows)
