"""Object stream: deciding which object an action was directed at.

Object positions arrive in the same camera space as the skeleton. Each
object frame is pushed through the transform derived from the skeleton
frame closest in time, so distances come out in hip-width units and are
unaffected by camera placement or body size. The object whose distance
to the acting hand stays smallest over the action window is the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSkeleton,
    DegenerateTriangle,
    EmptyWindow,
    InconsistentObjectSet,
)
from .skeleton import JOINT_INDEX, SkeletonFrame, apply_scene_transform, scene_transform

RIGHT_HAND = JOINT_INDEX["RightHand"]


@dataclass
class ObjectFrame:
    """Timestamped object positions keyed by integer object id."""

    t: int
    positions: dict[int, np.ndarray]

    def __post_init__(self):
        clean: dict[int, np.ndarray] = {}
        for oid, pos in self.positions.items():
            arr = np.asarray(pos, dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise ValueError(f"object {oid}: position must be a finite 3-vector")
            clean[int(oid)] = arr
        self.positions = clean


@dataclass
class TargetResolution:
    """Chosen object plus the aggregated hand distance for every candidate."""

    object_id: int
    scores: dict[int, float]


def proximity(obj_pos: np.ndarray, hand_pos: np.ndarray) -> float:
    """Euclidean distance between an object and the acting hand."""
    return float(np.linalg.norm(np.asarray(obj_pos, float) - np.asarray(hand_pos, float)))


def transform_objects(
    frame: ObjectFrame, scale: float, origin: np.ndarray, rot: np.ndarray
) -> ObjectFrame:
    """Apply a skeleton-derived scene transform to every object position."""
    moved = {
        oid: apply_scene_transform(pos, scale, origin, rot)
        for oid, pos in frame.positions.items()
    }
    return ObjectFrame(frame.t, moved)


def pair_by_time(
    skeleton_frames: Sequence[SkeletonFrame], object_frames: Sequence[ObjectFrame]
) -> list[tuple[SkeletonFrame, ObjectFrame]]:
    """Pair each object frame with the skeleton frame nearest in time.

    Ties on the time gap pick the earlier skeleton frame. Returns one
    pair per object frame, in object-frame order.
    """
    if not skeleton_frames:
        raise EmptyWindow("cannot pair object frames without skeleton frames")
    return [
        (min(skeleton_frames, key=lambda f: (abs(f.t - o.t), f.t)), o)
        for o in object_frames
    ]


def resolve_target(
    pairs: Sequence[tuple[SkeletonFrame, ObjectFrame]],
    hand_joint: int = RIGHT_HAND,
    aggregate: str = "mean",
) -> TargetResolution:
    """Identify the acted-on object over one window of paired frames.

    Each pair goes through the skeleton frame's scene transform before
    the hand distance is read. Per-object distances are aggregated over
    the window with the mean (or the minimum when aggregate="min") and
    the smallest aggregate wins, ties resolving to the smallest object
    id.

    Pairs whose skeleton is too degenerate to define a transform are
    skipped; the window fails only if no usable pair remains. All
    object frames in a window must report the same id set.
    """
    if aggregate not in ("mean", "min"):
        raise ValueError(f"aggregate must be 'mean' or 'min', not {aggregate!r}")
    if not pairs:
        raise EmptyWindow("need at least one skeleton/object frame pair")

    ids = sorted(pairs[0][1].positions)
    per_object: dict[int, list[float]] = {oid: [] for oid in ids}
    last_err: Exception | None = None
    for sframe, oframe in pairs:
        if sorted(oframe.positions) != ids:
            raise InconsistentObjectSet(
                f"object ids changed within a window: {ids} then {sorted(oframe.positions)}"
            )
        try:
            params = scene_transform(sframe)
        except (DegenerateSkeleton, DegenerateTriangle) as err:
            last_err = err
            continue
        hand = apply_scene_transform(sframe.joints[hand_joint], *params)
        moved = transform_objects(oframe, *params)
        for oid in ids:
            per_object[oid].append(proximity(moved.positions[oid], hand))

    if not ids:
        raise EmptyWindow("object frames carry no objects")
    if not per_object[ids[0]]:
        if last_err is not None:
            raise last_err
        raise EmptyWindow("no usable skeleton/object pair in the window")

    reducer = np.mean if aggregate == "mean" else np.min
    scores = {oid: float(reducer(per_object[oid])) for oid in ids}
    best = min(ids, key=lambda oid: (scores[oid], oid))
    return TargetResolution(best, scores)
