"""Supervised readout: one linear unit per action label.

Each unit scores an encoded trace by the cosine of the angle between
the trace vector and its weight vector, and learns with a delta rule
toward a one-hot target. The classical update moves weights along
(target - output); the sign-flipped variant (output - target) is kept
behind a flag for comparison, since it turns the rule into gradient
ascent on the error and never converges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyTrainingSet, UnknownLabel, ZeroVector

_EPS = 1e-12


@dataclass
class LabelScores:
    """Per-label activations of one classification, in layer label order."""

    labels: tuple[str, ...]
    scores: np.ndarray

    @property
    def best(self) -> str:
        """Highest-scoring label; ties resolve to the earliest label."""
        return self.labels[int(np.argmax(self.scores))]

    def as_dict(self) -> dict[str, float]:
        return {lab: float(s) for lab, s in zip(self.labels, self.scores)}


class SupervisedLayer:
    """Weight rows over encoded-trace space, one per label."""

    def __init__(self, labels: Sequence[str], weights: np.ndarray):
        labels = tuple(labels)
        weights = np.asarray(weights, dtype=float)
        if len(labels) == 0:
            raise ValueError("need at least one label")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be unique")
        if weights.ndim != 2 or weights.shape[0] != len(labels):
            raise ValueError(f"expected ({len(labels)}, D) weights, got {weights.shape}")
        self.labels = labels
        self.weights = weights

    @classmethod
    def random(cls, labels: Sequence[str], dim: int, rng: np.random.Generator) -> "SupervisedLayer":
        if dim < 1:
            raise ValueError("dim must be positive")
        return cls(labels, rng.random((len(labels), dim)))

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"label {label!r} not in {self.labels}") from None


def _check_vector(layer: SupervisedLayer, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (layer.dim,):
        raise DimensionMismatch(f"input has shape {x.shape}, layer expects ({layer.dim},)")
    return x


def activate(layer: SupervisedLayer, x: np.ndarray) -> LabelScores:
    """Cosine of the angle between x and each label's weight row.

    Scale-invariant by construction. A zero input has no direction and
    raises ZeroVector; a zero weight row scores 0 against everything.
    """
    x = _check_vector(layer, x)
    xn = np.linalg.norm(x)
    if xn < _EPS:
        raise ZeroVector("cannot score a zero trace vector")
    wn = np.linalg.norm(layer.weights, axis=1)
    scores = np.where(wn > _EPS, (layer.weights @ x) / (np.maximum(wn, _EPS) * xn), 0.0)
    return LabelScores(layer.labels, scores)


def train_step(
    layer: SupervisedLayer,
    x: np.ndarray,
    label: str,
    beta: float,
    printed_error_sign: bool = False,
) -> None:
    """One in-place delta-rule update toward the one-hot target for label."""
    x = _check_vector(layer, x)
    target = np.zeros(len(layer.labels))
    target[layer.index_of(label)] = 1.0
    y = activate(layer, x).scores
    err = (y - target) if printed_error_sign else (target - y)
    layer.weights += beta * err[:, None] * x[None, :]


def accuracy(layer: SupervisedLayer, xs: np.ndarray, labels: Sequence[str]) -> float:
    """Fraction of samples whose best-scoring label matches."""
    hits = sum(1 for x, lab in zip(xs, labels) if activate(layer, x).best == lab)
    return hits / len(labels)


def train(
    layer: SupervisedLayer,
    xs: np.ndarray,
    labels: Sequence[str],
    rng: np.random.Generator,
    epochs: int = 500,
    beta: float = 0.1,
    shuffle: bool = True,
    printed_error_sign: bool = False,
) -> list[float]:
    """Delta-rule epochs over (xs, labels); returns accuracy after each epoch."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise EmptyTrainingSet("training data must be a nonempty (N, D) array")
    if len(labels) != xs.shape[0]:
        raise ValueError("labels and samples must align one to one")
    for lab in labels:
        layer.index_of(lab)

    n = xs.shape[0]
    log: list[float] = []
    for _ in range(epochs):
        order = rng.permutation(n) if shuffle else np.arange(n)
        for k in order:
            train_step(layer, xs[k], labels[k], beta, printed_error_sign)
        log.append(accuracy(layer, xs, labels))
    return log
