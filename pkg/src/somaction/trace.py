"""Ordered-vector encoding of winner traces.

The sequence of layer-1 winners during an action sweeps a polyline over
the map surface. Removing consecutive repeats makes the polyline depend
only on which postures occurred in which order, not on how long each
was held, so performing the same action faster or slower leaves the
polyline unchanged. Resampling that polyline at equal arc-length steps
then yields a fixed-size vector suitable as second-layer input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySequence, EmptyTrainingSet

_EPS = 1e-12


@dataclass
class ActivityTrace:
    """Deduplicated winner path, points in the unit square, shape (M, 2)."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2 or self.points.shape[0] == 0:
            raise ValueError(f"expected nonempty (M, 2) points, got {self.points.shape}")

    def __len__(self) -> int:
        return self.points.shape[0]


def normalize_position(pos: tuple[int, int], shape: tuple[int, int]) -> tuple[float, float]:
    """Map a grid position into [0, 1] per axis; a single-unit axis maps to 0."""
    out = []
    for coord, size in zip(pos, shape):
        out.append(coord / (size - 1) if size > 1 else 0.0)
    return out[0], out[1]


def record_trace(
    winners: Sequence[tuple[int, int]],
    grid_shape: tuple[int, int],
    dedupe: bool = True,
) -> ActivityTrace:
    """Normalized winner path with consecutive repeats dropped.

    A winner is kept only when it differs from the immediately preceding
    one, so holding a posture for many frames contributes a single
    point. dedupe=False keeps every winner, for comparing against the
    raw path.
    """
    pts: list[tuple[float, float]] = []
    last: tuple[int, int] | None = None
    for win in winners:
        win = (int(win[0]), int(win[1]))
        if not dedupe or win != last:
            pts.append(normalize_position(win, grid_shape))
            last = win
    if not pts:
        raise EmptySequence("cannot record a trace from zero winners")
    return ActivityTrace(np.array(pts))


def trace_length(trace: ActivityTrace) -> float:
    """Total polyline length: sum of Euclidean steps between successive points."""
    if len(trace) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(trace.points, axis=0), axis=1).sum())


@dataclass(frozen=True)
class TraceEncoder:
    """Fixed segment count shared by every encoded trace."""

    n_segments: int

    def __post_init__(self):
        if self.n_segments < 1:
            raise ValueError("n_segments must be at least 1")

    @property
    def dim(self) -> int:
        """Length of an encoded vector: 2 coordinates per border point."""
        return 2 * (self.n_segments + 1)


def fit_encoder(traces: Iterable[ActivityTrace]) -> TraceEncoder:
    """Choose the segment count as the longest training trace's step count.

    Using the maximum means no training trace is ever downsampled; a
    trace of M points has M - 1 steps. Floors at one segment so
    single-point traces still produce a valid encoder.
    """
    longest = -1
    for t in traces:
        longest = max(longest, len(t) - 1)
    if longest < 0:
        raise EmptyTrainingSet("fit_encoder needs at least one trace")
    return TraceEncoder(max(longest, 1))


def resample_polyline(points: np.ndarray, n_segments: int) -> np.ndarray:
    """Points at equal arc-length fractions k/n along the polyline, (n+1, 2).

    The first and last outputs are exactly the original endpoints. A
    degenerate polyline (single point, or total length below 1e-12)
    replicates its first point.
    """
    points = np.asarray(points, dtype=float)
    n_out = n_segments + 1
    if points.shape[0] == 1:
        return np.repeat(points, n_out, axis=0)
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = steps.sum()
    if total < _EPS:
        return np.repeat(points[:1], n_out, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    targets = total * (np.arange(n_out) / n_segments)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(steps) - 1)
    denom = np.where(steps[idx] > 0.0, steps[idx], 1.0)
    frac = np.clip((targets - cum[idx]) / denom, 0.0, 1.0)
    out = points[idx] + frac[:, None] * (points[idx + 1] - points[idx])
    out[0] = points[0]
    out[-1] = points[-1]
    return out


def encode(trace: ActivityTrace, encoder: TraceEncoder) -> np.ndarray:
    """Flatten the equal-arc-length resampling into a vector of fixed size.

    Border points are laid out in path order, two coordinates each, so
    the result always has encoder.dim entries regardless of how many
    winners the action visited.
    """
    return resample_polyline(trace.points, encoder.n_segments).reshape(-1)
