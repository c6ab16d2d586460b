"""Summary-image construction: flow-weighted pooling and the baselines.

The central pooled vector is d = sum_i w_i * V_i over mean-subtracted
frame vectors V_i, with the weights w taken from the flow energy profile
(optionally flattened to a two-level rank-r pattern). That weighted sum is
exactly the first gradient-descent step, started from the zero vector, of

    J(d) = (ridge / 2) * ||d||^2 + sum_i (d . V_i - e_i)^2

up to a dropped positive step-size factor. `fpi_exact` instead minimizes J
outright through the small n x n Gram system. The remaining poolers
(dynamic, eigen, mean, max) are fixed weightings or per-pixel reductions
used for comparison.

All poolers are pure functions and accumulate in a fixed sequential order,
so outputs are bit-reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidRankError,
    LengthMismatchError,
    SingularSystemError,
    NoConvergenceError,
    TooShortError,
)
from .frame_io import (
    CenteredFrameMatrix,
    Frame,
    FrameSequence,
    center_frames,
    compute_mean_frame,
)

_POWER_ITER_TOL = 1e-10
_POWER_ITER_CAP = 10_000
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class RankRConfig:
    """Two-level flattening of an energy profile.

    The r largest energies become `high`, everything else `low`. Since only
    the gap high - low affects the pooled image (adding a constant to every
    weight of a centered sum changes nothing), the defaults (1, 0) are as
    good as any pair.
    """

    r: int
    high: float = 1.0
    low: float = 0.0

    def __post_init__(self) -> None:
        if self.r < 1:
            raise InvalidRankError(f"rank must be >= 1, got {self.r}")
        if not self.high > self.low:
            raise InvalidRankError(
                f"high must exceed low, got high={self.high} low={self.low}"
            )


@dataclass(frozen=True)
class ExactPoolResult:
    """Minimizer of the pooling objective plus its per-frame residuals."""

    d: np.ndarray
    residuals: np.ndarray

    @property
    def max_abs_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.residuals.size else 0.0


def fpi_weights(profile: np.ndarray, rank: RankRConfig | None = None) -> np.ndarray:
    """Pooling weights from an energy profile, optionally rank-flattened.

    Without a rank config the energies are used verbatim. With one, the r
    highest energies map to rank.high and the rest to rank.low; ties are
    broken toward the earlier frame.
    """
    energies = np.asarray(profile, dtype=np.float64)
    n = energies.shape[0]
    if rank is None:
        return energies.copy()
    if rank.r > n:
        raise InvalidRankError(f"rank {rank.r} exceeds profile length {n}")
    # Stable sort on negated energies: equal energies keep index order,
    # so the earlier frame wins a tie for a top-r slot.
    order = np.argsort(-energies, kind="stable")
    weights = np.full(n, rank.low, dtype=np.float64)
    weights[order[: rank.r]] = rank.high
    return weights


def weighted_sum(matrix: CenteredFrameMatrix, weights: np.ndarray) -> np.ndarray:
    """d = sum_i weights[i] * row_i, accumulated strictly in frame order."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (matrix.n,):
        raise LengthMismatchError(
            f"got {w.shape[0] if w.ndim == 1 else w.shape} weights for {matrix.n} frames"
        )
    total = np.zeros(matrix.d)
    for i in range(matrix.n):
        total += w[i] * matrix.rows[i]
    return total


def fpi_exact(
    matrix: CenteredFrameMatrix,
    profile: np.ndarray,
    ridge: float | None = None,
) -> ExactPoolResult:
    """Exact minimizer of the pooling objective via the n x n Gram system.

    Solving (ridge/2 * I + V V^T) a = e and setting d = V^T a gives the
    same d as the d-dimensional normal equations (ridge/2 * I + V^T V) d =
    V^T e — multiply the latter through by V to see it — but costs only an
    n x n solve. At ridge -> 0 this is the minimum-norm least-squares
    solution of d . V_i = e_i.

    ridge defaults to 1e-6 * trace(G) / n, a scale-aware nudge that keeps
    nearly rank-deficient Gram matrices solvable. Passing ridge=0 demands
    an invertible Gram matrix.

    Raises:
        SingularSystemError: ridge is 0 and the Gram matrix is numerically
            singular (condition estimate above 1e12).
    """
    energies = np.asarray(profile, dtype=np.float64)
    if energies.shape != (matrix.n,):
        raise LengthMismatchError(
            f"profile length {energies.shape} does not match {matrix.n} frames"
        )
    gram = matrix.rows @ matrix.rows.T
    if not gram.any():
        # every row is zero (motionless clip): the minimum-norm solution is
        # the zero vector for any ridge, no solve needed
        return ExactPoolResult(d=np.zeros(matrix.d), residuals=-energies)
    if ridge is None:
        ridge = 1e-6 * float(np.trace(gram)) / matrix.n
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    system = (ridge / 2.0) * np.eye(matrix.n) + gram
    if ridge == 0.0 and np.linalg.cond(system) > _COND_LIMIT:
        raise SingularSystemError(
            "Gram matrix is numerically singular; pass a positive ridge"
        )
    try:
        coeffs = np.linalg.solve(system, energies)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    d = matrix.rows.T @ coeffs
    residuals = matrix.rows @ d - energies
    return ExactPoolResult(d=d, residuals=residuals)


def _round_half_away(values: np.ndarray) -> np.ndarray:
    """Round non-negative values with halves going up (away from zero)."""
    return np.floor(values + 0.5)


def rescale_to_image(raw: np.ndarray, width: int, height: int) -> Frame:
    """Affine-map a pooled vector onto [0, 255] and pack it as a frame.

    The minimum lands on 0 and the maximum on 255, rounding half away from
    zero. A constant vector (e.g. a motionless clip pooled to all zeros)
    has no usable range and maps to uniform mid-gray 128.
    """
    flat = np.asarray(raw, dtype=np.float64).reshape(-1)
    if flat.shape[0] != 3 * width * height:
        raise LengthMismatchError(
            f"raw length {flat.shape[0]} != 3 * {width} * {height}"
        )
    lo = float(flat.min())
    hi = float(flat.max())
    if hi == lo:
        data = np.full(flat.shape, 128, dtype=np.uint8)
    else:
        scaled = (flat - lo) * (255.0 / (hi - lo))
        data = np.clip(_round_half_away(scaled), 0, 255).astype(np.uint8)
    return Frame(data.reshape(height, width, 3))


def flow_profile_image(
    seq: FrameSequence,
    profile: np.ndarray,
    rank: RankRConfig | None = None,
) -> Frame:
    """Pool a sequence into one image weighted by its flow energy profile.

    Pipeline: mean frame -> centered rows -> (optional rank flattening) ->
    weighted sum -> rescale to 8-bit.
    """
    matrix = center_frames(seq, compute_mean_frame(seq))
    weights = fpi_weights(profile, rank)
    raw = weighted_sum(matrix, weights)
    return rescale_to_image(raw, seq.width, seq.height)


def flow_profile_image_exact(
    seq: FrameSequence,
    profile: np.ndarray,
    rank: RankRConfig | None = None,
    ridge: float | None = None,
) -> tuple[Frame, ExactPoolResult]:
    """Like flow_profile_image but minimizing the objective exactly.

    Returns the summary image together with the solver result, whose
    residuals say how well d reproduces the (possibly flattened) profile.
    """
    matrix = center_frames(seq, compute_mean_frame(seq))
    targets = fpi_weights(profile, rank)
    result = fpi_exact(matrix, targets, ridge)
    return rescale_to_image(result.d, seq.width, seq.height), result


def dynamic_coefficients(n: int) -> np.ndarray:
    """Closed-form approximate rank-pooling coefficients for n frames.

    alpha_t = 2 (T - t + 1) - (T + 1) (H_T - H_{t-1}) with H_k the k-th
    harmonic number and H_0 = 0. The coefficients always sum to zero, which
    is what lets the pooled image ignore any static component shared by all
    frames.

    Numerics: the difference H_T - H_{t-1} is accumulated directly as the
    tail sum 1/t + ... + 1/T (a reversed cumulative sum) instead of
    subtracting two large harmonic numbers, and the residue of the zero-sum
    identity — a few last-bit rounding errors amplified by the (T + 1)
    factor — is projected out at the end. The projection shifts each
    coefficient by well under one part in 1e12 and is a no-op whenever the
    float sum is already exact (e.g. T = 2, whose coefficients are exactly
    -1/2 and +1/2).
    """
    if n < 2:
        raise TooShortError(f"need at least 2 frames, got {n}")
    t = np.arange(1, n + 1, dtype=np.float64)
    tail = np.cumsum((1.0 / t)[::-1])[::-1]  # tail[t-1] = H_n - H_{t-1}
    coeffs = 2.0 * (n - t + 1.0) - (n + 1.0) * tail
    coeffs -= coeffs.sum() / n
    return coeffs


def dynamic_image(seq: FrameSequence) -> Frame:
    """Approximate rank-pooling summary with fixed harmonic-number weights.

    Because the coefficients sum to zero, weighting raw frames and
    weighting mean-subtracted frames give the same vector in exact
    arithmetic; the centered form is used so that a motionless clip pools
    to exactly zero (the tiny float residue of the coefficient sum times a
    raw frame would otherwise leak through) and lands on the uniform-gray
    degenerate path.
    """
    if len(seq) < 2:
        raise TooShortError(f"need at least 2 frames, got {len(seq)}")
    coeffs = dynamic_coefficients(len(seq))
    matrix = center_frames(seq, compute_mean_frame(seq))
    raw = weighted_sum(matrix, coeffs)
    return rescale_to_image(raw, seq.width, seq.height)


def _power_iteration(gram: np.ndarray) -> np.ndarray | None:
    """Dominant eigenvector of a symmetric PSD matrix, or None if it is ~0.

    Starts from the uniform unit vector; a start that the matrix
    annihilates (for a centered Gram matrix the uniform vector always is,
    since the rows of V sum to zero) falls back to standard basis vectors.
    """
    n = gram.shape[0]
    scale = float(np.linalg.norm(gram))
    if scale == 0.0:
        return None
    null_tol = 1e-9 * scale
    identity = np.eye(n)
    starts = [np.full(n, 1.0 / np.sqrt(n))] + [identity[k] for k in range(n)]
    for start in starts:
        vec = start
        for _ in range(_POWER_ITER_CAP):
            nxt = gram @ vec
            norm = float(np.linalg.norm(nxt))
            if norm <= null_tol:
                break  # start lies in the null space; try the next one
            nxt /= norm
            if 1.0 - abs(float(nxt @ vec)) < _POWER_ITER_TOL:
                return nxt
            vec = nxt
        else:
            raise NoConvergenceError(
                f"power iteration did not settle in {_POWER_ITER_CAP} steps"
            )
    return None


def eigen_pool_vector(matrix: CenteredFrameMatrix) -> np.ndarray:
    """Project the centered rows onto their dominant temporal eigenvector.

    The weight vector w is the top eigenvector of the n x n Gram matrix
    V V^T; the pooled vector is V^T w, sign-fixed so its largest-magnitude
    entry is positive (eigenvectors are only defined up to sign). An
    all-zero matrix (motionless clip) pools to the zero vector.
    """
    gram = matrix.rows @ matrix.rows.T
    top = _power_iteration(gram)
    if top is None:
        return np.zeros(matrix.d)
    raw = matrix.rows.T @ top
    peak = int(np.argmax(np.abs(raw)))
    if raw[peak] < 0:
        raw = -raw
    return raw


def eigen_image(seq: FrameSequence) -> Frame:
    """Summary image along the dominant temporal eigenvector of the clip."""
    if len(seq) < 2:
        raise TooShortError(f"need at least 2 frames, got {len(seq)}")
    matrix = center_frames(seq, compute_mean_frame(seq))
    raw = eigen_pool_vector(matrix)
    return rescale_to_image(raw, seq.width, seq.height)


def mean_image(seq: FrameSequence) -> Frame:
    """Per-pixel, per-channel mean image, rounded half away from zero."""
    mean = seq.stack().mean(axis=0)
    return Frame(_round_half_away(mean).astype(np.uint8))


def max_image(seq: FrameSequence) -> Frame:
    """Per-pixel, per-channel maximum image."""
    peak = np.stack([f.pixels for f in seq.frames]).max(axis=0)
    return Frame(peak.astype(np.uint8))
