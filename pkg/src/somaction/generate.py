"""Synthetic scene generator: scripted arm actions over tabletop objects.

Each window animates a standing figure whose right hand sweeps an
action-specific path while the rest of the body holds still. The hand
path is quantized into a fixed set of key postures and every frame
snaps to one of them, so performing a window faster or slower changes
how many frames each key posture is held but never which postures
appear or in what order. Downstream, that makes the deduplicated
winner path of a window independent of playback speed by construction.

For push, pull, put and lift the target object is glued to the emitted
hand position frame by frame; for point it sits just beyond the
fingertip along the pointing direction. Distractors are static and
keep a generous clearance from the whole hand path. Coordinates go out
in millimetres.
"""

from __future__ import annotations

import numpy as np

from .config import GeneratorConfig
from .skeleton import JOINT_INDEX, N_JOINTS
from .stream import ManifestEntry, Mark, serialize_record
from .objects import ObjectFrame
from .skeleton import SkeletonFrame

N_KEYPOSES = 16
BASE_DURATION_S = 1.6
REST_FRAMES = 3
HIP_WIDTH_M = 0.3
ENDPOINT_JITTER_M = 0.03
DISTRACTOR_CLEARANCE_M = 0.24
POINT_TARGET_OFFSET_M = 0.045
# Sampling box for distractor objects: in front of the agent, table height.
DISTRACTOR_BOX = np.array([[-0.7, 0.7], [0.6, 1.8], [0.1, 0.9]])

RIGHT_SHOULDER = JOINT_INDEX["RightShoulder"]
RIGHT_ELBOW = JOINT_INDEX["RightElbow"]
RIGHT_HAND = JOINT_INDEX["RightHand"]

# Hand path endpoints per action, metres, agent at origin facing +z.
ACTION_PATHS = {
    "push": ((-0.25, 1.15, 0.18), (-0.25, 1.15, 0.56)),
    "pull": ((-0.25, 1.15, 0.56), (-0.25, 1.15, 0.18)),
    "put": ((-0.27, 1.32, 0.34), (-0.27, 0.90, 0.34)),
    "lift": ((-0.27, 0.90, 0.34), (-0.27, 1.32, 0.34)),
    "point": ((-0.24, 1.18, 0.16), (-0.22, 1.38, 0.52)),
}
# Fraction of the window the point gesture spends reaching before the hold.
POINT_REACH_FRACTION = 0.4


def base_pose() -> np.ndarray:
    """Standing figure, metres: right side at negative x, facing +z."""
    j = np.zeros((N_JOINTS, 3))
    j[JOINT_INDEX["Head"]] = (0.0, 1.70, 0.0)
    j[JOINT_INDEX["Neck"]] = (0.0, 1.50, 0.0)
    j[JOINT_INDEX["RightShoulder"]] = (-0.20, 1.45, 0.0)
    j[JOINT_INDEX["RightElbow"]] = (-0.23, 1.20, 0.03)
    j[JOINT_INDEX["RightHand"]] = (-0.24, 0.98, 0.06)
    j[JOINT_INDEX["RightHip"]] = (-0.15, 1.00, 0.0)
    j[JOINT_INDEX["LeftHip"]] = (0.15, 1.00, 0.0)
    j[JOINT_INDEX["Torso"]] = (0.0, 1.25, 0.0)
    j[JOINT_INDEX["LeftShoulder"]] = (0.20, 1.45, 0.0)
    j[JOINT_INDEX["LeftElbow"]] = (0.23, 1.20, 0.03)
    j[JOINT_INDEX["LeftHand"]] = (0.24, 0.98, 0.06)
    j[JOINT_INDEX["RightKnee"]] = (-0.16, 0.55, 0.01)
    j[JOINT_INDEX["RightFoot"]] = (-0.17, 0.08, 0.02)
    j[JOINT_INDEX["LeftKnee"]] = (0.16, 0.55, 0.01)
    j[JOINT_INDEX["LeftFoot"]] = (0.17, 0.08, 0.02)
    return j


def _pose_with_hand(hand: np.ndarray) -> np.ndarray:
    """Base pose with the right arm reposed around a given hand position."""
    j = base_pose()
    shoulder = j[RIGHT_SHOULDER]
    j[RIGHT_HAND] = hand
    j[RIGHT_ELBOW] = shoulder + 0.55 * (hand - shoulder) + np.array([0.0, -0.05, 0.02])
    return j


def _path_point(action: str, u: float, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    """Hand position at path parameter u in [0, 1]."""
    if action == "point":
        v = min(u / POINT_REACH_FRACTION, 1.0)
    else:
        v = u
    return start + v * (end - start)


def action_keyposes(action: str, jitter: np.ndarray) -> np.ndarray:
    """(N_KEYPOSES, 15, 3) joint sets for one window, metres.

    jitter is a (2, 3) offset pair applied to the path start and end,
    giving per-sample variation in where the movement happens.
    """
    base_start, base_end = ACTION_PATHS[action]
    start = np.asarray(base_start) + jitter[0]
    end = np.asarray(base_end) + jitter[1]
    poses = np.empty((N_KEYPOSES, N_JOINTS, 3))
    for k in range(N_KEYPOSES):
        u = k / (N_KEYPOSES - 1)
        poses[k] = _pose_with_hand(_path_point(action, u, start, end))
    return poses


def _point_target(keyposes: np.ndarray) -> np.ndarray:
    """Static target for point: just past the fingertip along the arm."""
    hand = keyposes[-1, RIGHT_HAND]
    shoulder = keyposes[-1, RIGHT_SHOULDER]
    direction = hand - shoulder
    direction = direction / np.linalg.norm(direction)
    return hand + POINT_TARGET_OFFSET_M * direction


def _place_distractors(
    rng: np.random.Generator, hand_path: np.ndarray, n: int, keep_clear: list[np.ndarray]
) -> list[np.ndarray]:
    """Static positions with clearance from the hand path and each other."""
    placed: list[np.ndarray] = []
    guard = 0
    while len(placed) < n:
        guard += 1
        if guard > 10_000:
            raise RuntimeError("could not place distractors with required clearance")
        pos = rng.uniform(DISTRACTOR_BOX[:, 0], DISTRACTOR_BOX[:, 1])
        clear = np.min(np.linalg.norm(hand_path - pos, axis=1)) >= DISTRACTOR_CLEARANCE_M
        for other in placed + keep_clear:
            clear = clear and np.linalg.norm(other - pos) >= DISTRACTOR_CLEARANCE_M
        if clear:
            placed.append(pos)
    return placed


def _window_rng(seed: int, action_idx: int, sample_idx: int) -> np.random.Generator:
    return np.random.default_rng([seed, action_idx, sample_idx])


def _mm(x: np.ndarray) -> np.ndarray:
    return np.round(np.asarray(x) * 1000.0, 3)


def sample_window(
    cfg: GeneratorConfig, action_idx: int, sample_idx: int, t0: int
) -> tuple[list, int, int]:
    """Build one action window starting at time t0 (ms).

    Returns (records, target_object_id, next_t). Records are mark,
    skeleton and object records in timestamp order. The whole window is
    a pure function of (config, action_idx, sample_idx).
    """
    action = cfg.actions[action_idx]
    rng = _window_rng(cfg.seed, action_idx, sample_idx)
    # Draw order is part of the format: speed first, then target id,
    # path jitter, distractor placement, and per-frame noise last, so
    # configs differing only in speed range or noise stay scene-aligned.
    speed = rng.uniform(cfg.speed_min, cfg.speed_max)
    target_id = int(rng.integers(1, cfg.n_objects + 1))
    jitter = rng.uniform(-ENDPOINT_JITTER_M, ENDPOINT_JITTER_M, size=(2, 3))

    keyposes = action_keyposes(action, jitter)
    hand_path = keyposes[:, RIGHT_HAND, :]
    rides_hand = action != "point"
    point_target = None if rides_hand else _point_target(keyposes)
    keep_clear = [] if point_target is None else [point_target]
    distractor_ids = [i for i in range(1, cfg.n_objects + 1) if i != target_id]
    distractors = dict(
        zip(distractor_ids, _place_distractors(rng, hand_path, len(distractor_ids), keep_clear))
    )

    duration = BASE_DURATION_S / speed
    n_frames = max(int(round(duration * cfg.frame_rate)), N_KEYPOSES + 1)
    noise = None
    if cfg.noise_stddev > 0:
        noise = rng.normal(
            scale=cfg.noise_stddev * HIP_WIDTH_M, size=(n_frames, N_JOINTS, 3)
        )

    interval = 1000.0 / cfg.frame_rate
    times = [t0 + int(round(k * interval)) for k in range(n_frames)]
    records: list = [Mark(times[0], "start", action)]
    static_mm = {oid: _mm(pos) for oid, pos in distractors.items()}
    if point_target is not None:
        static_mm[target_id] = _mm(point_target)
    for k in range(n_frames):
        u = k / (n_frames - 1)
        pose = keyposes[min(int(u * N_KEYPOSES), N_KEYPOSES - 1)]
        if noise is not None:
            pose = pose + noise[k]
        joints_mm = _mm(pose)
        records.append(SkeletonFrame(times[k], joints_mm))
        positions = {oid: pos.copy() for oid, pos in static_mm.items()}
        if rides_hand:
            positions[target_id] = joints_mm[RIGHT_HAND].copy()
        records.append(ObjectFrame(times[k], positions))
    records.append(Mark(times[-1], "end"))
    return records, target_id, times[-1] + int(round(interval))


def generate_stream(cfg: GeneratorConfig) -> tuple[list[str], list[ManifestEntry]]:
    """Full dataset: serialized stream lines plus the window manifest.

    Windows cycle through the configured actions round-robin so labels
    first appear in config order; a few unlabeled rest frames separate
    consecutive windows.
    """
    rest_pose_mm = _mm(base_pose())
    interval = 1000.0 / cfg.frame_rate
    lines: list[str] = []
    manifest: list[ManifestEntry] = []
    t = 0
    index = 0
    for sample_idx in range(cfg.samples_per_action):
        for action_idx in range(len(cfg.actions)):
            if index > 0:
                for _ in range(REST_FRAMES):
                    lines.append(serialize_record(SkeletonFrame(t, rest_pose_mm)))
                    t += int(round(interval))
            records, target_id, t = sample_window(cfg, action_idx, sample_idx, t)
            lines.extend(serialize_record(r) for r in records)
            manifest.append(ManifestEntry(index, cfg.actions[action_idx], target_id))
            index += 1
    return lines, manifest
