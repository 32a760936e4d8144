"""Shared test helpers and expensive session fixtures."""

import numpy as np
import pytest

ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance PASS/FAIL ledger after the run, so the
    verdict lines are visible even with output capture on."""
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.line(line)

from somaction.config import (
    GeneratorConfig,
    PipelineConfig,
    SomLayerConfig,
    SupervisedConfig,
)
from somaction.generate import generate_stream
from somaction.pipeline import train_pipeline
from somaction.skeleton import JOINT_INDEX, N_JOINTS, SkeletonFrame
from somaction.stream import iter_windows


def make_skeleton(t=0):
    """A plausible standing posture in millimetres, facing +z."""
    j = np.zeros((N_JOINTS, 3))
    j[JOINT_INDEX["Head"]] = (0, 1700, 0)
    j[JOINT_INDEX["Neck"]] = (0, 1500, 0)
    j[JOINT_INDEX["RightShoulder"]] = (-200, 1450, 0)
    j[JOINT_INDEX["RightElbow"]] = (-230, 1200, 30)
    j[JOINT_INDEX["RightHand"]] = (-240, 980, 60)
    j[JOINT_INDEX["RightHip"]] = (-150, 1000, 0)
    j[JOINT_INDEX["LeftHip"]] = (150, 1000, 0)
    j[JOINT_INDEX["Torso"]] = (0, 1250, 0)
    j[JOINT_INDEX["LeftShoulder"]] = (200, 1450, 0)
    j[JOINT_INDEX["LeftElbow"]] = (230, 1200, 30)
    j[JOINT_INDEX["LeftHand"]] = (240, 980, 60)
    j[JOINT_INDEX["RightKnee"]] = (-160, 550, 10)
    j[JOINT_INDEX["RightFoot"]] = (-170, 80, 20)
    j[JOINT_INDEX["LeftKnee"]] = (160, 550, 10)
    j[JOINT_INDEX["LeftFoot"]] = (170, 80, 20)
    return SkeletonFrame(t, j)


def random_rotation(rng):
    """Uniformly random proper rotation matrix from a unit quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def small_pipeline_config(seed=11):
    """Downsized maps and schedules so tests train in about a second."""
    return PipelineConfig(
        layer1=SomLayerConfig(rows=12, cols=12, epochs=80),
        layer2=SomLayerConfig(rows=14, cols=14, epochs=80),
        supervised=SupervisedConfig(epochs=200),
        seed=seed,
    )


@pytest.fixture(scope="session")
def train_stream():
    """(lines, manifest) of a small labeled training stream."""
    return generate_stream(GeneratorConfig(samples_per_action=4, seed=7))


@pytest.fixture(scope="session")
def train_windows(train_stream):
    return list(iter_windows(train_stream[0]))


@pytest.fixture(scope="session")
def small_config():
    return small_pipeline_config()


@pytest.fixture(scope="session")
def trained(train_windows, small_config):
    """(model, report) trained once and shared across test modules."""
    return train_pipeline(train_windows, small_config)


@pytest.fixture(scope="session")
def eval_stream():
    """(lines, manifest) of a held-out stream from a different seed."""
    return generate_stream(GeneratorConfig(samples_per_action=3, seed=23))
