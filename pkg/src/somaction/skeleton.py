"""Skeleton data types and posture preprocessing.

A skeleton frame holds 15 joints in 3D camera coordinates. Before any
posture reaches the recognizer it is rescaled to a standard size
(hip-to-hip distance 1), expressed in an egocentric coordinate system
anchored at the hips and torso, and reduced to the attended body part
as a min-max normalized flat vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateSkeleton, DegenerateTriangle, EmptyTrainingSet

N_JOINTS = 15

# Indices 5, 6 and 7 anchor the egocentric frame and are fixed; the
# remaining assignments group the limbs contiguously.
JOINT_NAMES = (
    "Head",           # 0
    "Neck",           # 1
    "RightShoulder",  # 2
    "RightElbow",     # 3
    "RightHand",      # 4
    "RightHip",       # 5
    "LeftHip",        # 6
    "Torso",          # 7
    "LeftShoulder",   # 8
    "LeftElbow",      # 9
    "LeftHand",       # 10
    "RightKnee",      # 11
    "RightFoot",      # 12
    "LeftKnee",       # 13
    "LeftFoot",       # 14
)
JOINT_INDEX = {name: i for i, name in enumerate(JOINT_NAMES)}

RIGHT_HIP = JOINT_INDEX["RightHip"]
LEFT_HIP = JOINT_INDEX["LeftHip"]
TORSO = JOINT_INDEX["Torso"]

# Hips stay with the trunk since they define the egocentric frame.
DEFAULT_PART_MEMBERS = {
    "RightArm": ("RightShoulder", "RightElbow", "RightHand"),
    "LeftArm": ("LeftShoulder", "LeftElbow", "LeftHand"),
    "RightLeg": ("RightKnee", "RightFoot"),
    "LeftLeg": ("LeftKnee", "LeftFoot"),
    "Body": ("Head", "Neck", "RightHip", "LeftHip", "Torso"),
}

_EPS = 1e-9


@dataclass
class SkeletonFrame:
    """One timestamped posture: 15 joint positions, each (x, y, z)."""

    t: int
    joints: np.ndarray  # (15, 3) float64

    def __post_init__(self):
        self.joints = np.asarray(self.joints, dtype=float)
        if self.joints.shape != (N_JOINTS, 3):
            raise ValueError(f"expected (15, 3) joints, got {self.joints.shape}")
        if not np.all(np.isfinite(self.joints)):
            raise ValueError("joint positions must be finite")


@dataclass(frozen=True)
class BodyPart:
    """A named group of joints, identified by ascending joint index."""

    name: str
    joints: tuple[int, ...]

    @classmethod
    def named(cls, name: str, members: dict[str, Sequence[str]] | None = None) -> "BodyPart":
        """Look up a part by name in `members` (default five-part split)."""
        table = members if members is not None else DEFAULT_PART_MEMBERS
        if name not in table:
            raise KeyError(f"unknown body part {name!r}")
        idx = tuple(sorted(JOINT_INDEX[j] for j in table[name]))
        return cls(name, idx)

    @property
    def dim(self) -> int:
        return 3 * len(self.joints)


def default_parts() -> dict[str, BodyPart]:
    return {name: BodyPart.named(name) for name in DEFAULT_PART_MEMBERS}


def hip_span(joints: np.ndarray) -> float:
    return float(np.linalg.norm(joints[LEFT_HIP] - joints[RIGHT_HIP]))


def rescale_frame(frame: SkeletonFrame) -> SkeletonFrame:
    """Uniformly scale all joints so the hip-to-hip distance is exactly 1.

    Shape is preserved; raises DegenerateSkeleton if the hips coincide.
    """
    span = hip_span(frame.joints)
    if span < _EPS:
        raise DegenerateSkeleton(f"hip distance {span:.3e} below {_EPS:.0e}")
    return SkeletonFrame(frame.t, frame.joints / span)


def egocentric_basis(joints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Build the body-anchored frame from the hips and torso.

    Returns (origin, rotation): origin is the orthogonal projection of the
    torso joint onto the hip line; the rotation columns are the lateral
    axis (right hip toward left hip), the vertical axis (origin toward
    torso) and their cross product, forming a right-handed orthonormal
    basis. Raises DegenerateTriangle when the three joints are collinear.
    """
    right, left, torso = joints[RIGHT_HIP], joints[LEFT_HIP], joints[TORSO]
    across = left - right
    span = np.linalg.norm(across)
    if span < _EPS:
        raise DegenerateTriangle("hip joints coincide; hip line undefined")
    lateral = across / span
    origin = right + np.dot(torso - right, lateral) * lateral
    up = torso - origin
    height = np.linalg.norm(up)
    if height < _EPS:
        raise DegenerateTriangle(
            f"torso distance to hip line {height:.3e} below {_EPS:.0e}"
        )
    vertical = up / height
    forward = np.cross(lateral, vertical)
    return origin, np.column_stack((lateral, vertical, forward))


def egocentric_transform(frame: SkeletonFrame) -> SkeletonFrame:
    """Express all joints in the egocentric frame of this posture."""
    origin, rot = egocentric_basis(frame.joints)
    return SkeletonFrame(frame.t, (frame.joints - origin) @ rot)


def scene_transform(frame: SkeletonFrame) -> tuple[float, np.ndarray, np.ndarray]:
    """Derive (scale, origin, rotation) from a raw frame.

    Applying the triple maps any camera-space point into the rescaled
    egocentric space of this posture; the skeleton itself and any scene
    objects must go through the identical triple.
    """
    span = hip_span(frame.joints)
    if span < _EPS:
        raise DegenerateSkeleton(f"hip distance {span:.3e} below {_EPS:.0e}")
    scale = 1.0 / span
    origin, rot = egocentric_basis(frame.joints * scale)
    return scale, origin, rot


def apply_scene_transform(
    points: np.ndarray, scale: float, origin: np.ndarray, rot: np.ndarray
) -> np.ndarray:
    return (np.asarray(points, dtype=float) * scale - origin) @ rot


def preprocess_frame(frame: SkeletonFrame) -> SkeletonFrame:
    """Rescale then egocentric-transform one raw frame."""
    params = scene_transform(frame)
    return SkeletonFrame(frame.t, apply_scene_transform(frame.joints, *params))


@dataclass(frozen=True)
class Bounds:
    """Per-dimension min/max used to squash attended coordinates to [0, 1]."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("bounds must be matching 1-D arrays")
        if not (np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi))):
            raise ValueError("bounds must be finite")
        if np.any(self.hi <= self.lo):
            raise ValueError("each upper bound must exceed its lower bound")


def part_coords(frame: SkeletonFrame, part: BodyPart) -> np.ndarray:
    """Flat (3k,) coordinates of the part's joints in ascending joint order."""
    return frame.joints[list(part.joints)].reshape(-1)


def fit_bounds(frames: Iterable[SkeletonFrame], part: BodyPart) -> Bounds:
    """Elementwise min/max of attended coordinates over preprocessed frames.

    Dimensions with no spread (max - min < 1e-9) are widened by 0.5 on
    each side so normalization stays well defined.
    """
    rows = [part_coords(f, part) for f in frames]
    if not rows:
        raise EmptyTrainingSet("fit_bounds needs at least one frame")
    stacked = np.asarray(rows)
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    flat = (hi - lo) < _EPS
    lo[flat] -= 0.5
    hi[flat] += 0.5
    return Bounds(lo, hi)


def attend(frame: SkeletonFrame, part: BodyPart, bounds: Bounds) -> np.ndarray:
    """Posture vector: the part's coordinates min-max mapped into [0, 1].

    Out-of-range coordinates (possible at inference) are clamped.
    """
    raw = part_coords(frame, part)
    if raw.shape != bounds.lo.shape:
        raise ValueError(
            f"bounds dimension {bounds.lo.shape[0]} does not match part {part.name}"
        )
    return np.clip((raw - bounds.lo) / (bounds.hi - bounds.lo), 0.0, 1.0)
