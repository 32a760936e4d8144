"""Self-organizing map: activation, winner lookup, neighborhood training.

Units live on a rectangular grid. Net input is the Euclidean distance
between the input and a unit's weight vector, activity is a softmax-free
exponential transfer of that distance, and learning pulls the winner's
neighborhood toward each presented input under exponentially decaying
learning rate and neighborhood radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyTrainingSet

DEFAULT_ACTIVITY_SIGMA = 1e6


class SomGrid:
    """Weight matrix of an I x J map over D-dimensional inputs."""

    def __init__(self, weights: np.ndarray):
        weights = np.asarray(weights, dtype=float)
        if weights.ndim != 3:
            raise ValueError(f"expected (I, J, D) weights, got {weights.shape}")
        self.weights = weights
        self._grid_dist: np.ndarray | None = None

    @classmethod
    def random(cls, rows: int, cols: int, dim: int, rng: np.random.Generator) -> "SomGrid":
        """Fresh map with weights drawn uniformly from [0, 1)."""
        if rows < 1 or cols < 1 or dim < 1:
            raise ValueError("rows, cols and dim must all be positive")
        return cls(rng.random((rows, cols, dim)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape[:2]

    @property
    def dim(self) -> int:
        return self.weights.shape[2]

    def grid_distances(self) -> np.ndarray:
        """(I*J, I, J) table: entry [c] holds each unit's Euclidean
        distance on the grid to unit c (row-major). Built lazily once."""
        if self._grid_dist is None:
            rows, cols = self.shape
            ii, jj = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
            coords = np.stack([ii, jj], axis=-1).reshape(-1, 2).astype(float)
            diff = coords[:, None, :] - coords[None, :, :]
            self._grid_dist = np.linalg.norm(diff, axis=2).reshape(-1, rows, cols)
        return self._grid_dist

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"input has shape {x.shape}, map expects ({self.dim},)"
            )
        return x


def net_input(grid: SomGrid, x: np.ndarray) -> np.ndarray:
    """Euclidean distance from x to every unit's weight vector, (I, J)."""
    x = grid._check_input(x)
    diff = grid.weights - x
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def activity(grid: SomGrid, x: np.ndarray, sigma: float = DEFAULT_ACTIVITY_SIGMA) -> np.ndarray:
    """Unit activities exp(-s/sigma) of the net input s, in (0, 1]."""
    return np.exp(-net_input(grid, x) / sigma)


def winner(activations: np.ndarray) -> tuple[int, int]:
    """Grid position of the most active unit.

    Ties resolve to the first maximum in row-major order, so the result
    is deterministic for identical activation arrays.
    """
    flat = int(np.argmax(activations))
    i, j = divmod(flat, activations.shape[1])
    return i, j


@dataclass
class TrainingSchedule:
    """Decay plan for one training run.

    Both the learning rate and the neighborhood radius decay as
    exp(-t/tau) in the presentation counter t. Fields left at None are
    resolved against the data size when training starts: tau_alpha
    defaults to half the total presentations, sigma0 to half the larger
    grid side, and tau_sigma to total/log(sigma0) so the radius ends
    near one unit.
    """

    epochs: int = 1000
    alpha0: float = 0.1
    tau_alpha: float | None = None
    sigma0: float | None = None
    tau_sigma: float | None = None
    squared_neighborhood: bool = False
    shuffle: bool = True

    def resolve(self, grid_shape: tuple[int, int], n_samples: int) -> "TrainingSchedule":
        total = self.epochs * n_samples
        sigma0 = self.sigma0 if self.sigma0 is not None else max(grid_shape) / 2.0
        tau_alpha = self.tau_alpha if self.tau_alpha is not None else total / 2.0
        if self.tau_sigma is not None:
            tau_sigma = self.tau_sigma
        elif sigma0 > 1.0:
            tau_sigma = total / math.log(sigma0)
        else:
            tau_sigma = float(total)
        return TrainingSchedule(
            epochs=self.epochs,
            alpha0=self.alpha0,
            tau_alpha=tau_alpha,
            sigma0=sigma0,
            tau_sigma=tau_sigma,
            squared_neighborhood=self.squared_neighborhood,
            shuffle=self.shuffle,
        )


def neighborhood(
    grid: SomGrid, win: tuple[int, int], sigma: float, squared: bool = False
) -> np.ndarray:
    """Gaussian-style kernel around the winner on the grid, (I, J).

    The default kernel is exp(-d / (2 sigma^2)) in the plain grid
    distance d; squared=True uses d^2 instead, which shrinks the
    effective footprint faster.
    """
    rows, cols = grid.shape
    d = grid.grid_distances()[win[0] * cols + win[1]]
    if squared:
        d = d * d
    return np.exp(-d / (2.0 * sigma * sigma))


def adapt(
    grid: SomGrid,
    x: np.ndarray,
    win: tuple[int, int],
    alpha: float,
    sigma: float,
    squared: bool = False,
) -> None:
    """One in-place weight update pulling the neighborhood toward x."""
    x = grid._check_input(x)
    g = neighborhood(grid, win, sigma, squared)
    grid.weights -= (alpha * g)[:, :, None] * (grid.weights - x)


def train(
    grid: SomGrid,
    data: np.ndarray,
    schedule: TrainingSchedule,
    rng: np.random.Generator,
) -> list[float]:
    """Fit the map to data, returning mean winner distance per epoch.

    Each epoch presents every sample once (shuffled by default); the
    decay clock t counts presentations across the whole run. The
    returned log entry for an epoch is the mean net input at the winner
    measured before each update, a monotone-ish quantization error trace
    useful for convergence checks.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] == 0:
        raise EmptyTrainingSet("training data must be a nonempty (N, D) array")
    if data.shape[1] != grid.dim:
        raise DimensionMismatch(
            f"training data dim {data.shape[1]} does not match map dim {grid.dim}"
        )

    sched = schedule.resolve(grid.shape, data.shape[0])
    rows, cols = grid.shape
    dist_table = grid.grid_distances()
    weights = grid.weights
    n = data.shape[0]
    t = 0
    log: list[float] = []
    for _ in range(sched.epochs):
        order = rng.permutation(n) if sched.shuffle else np.arange(n)
        qe = 0.0
        for k in order:
            x = data[k]
            diff = weights - x
            s = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
            flat = int(np.argmin(s))
            qe += s.flat[flat]
            alpha = sched.alpha0 * math.exp(-t / sched.tau_alpha)
            sigma = sched.sigma0 * math.exp(-t / sched.tau_sigma)
            d = dist_table[flat]
            if sched.squared_neighborhood:
                d = d * d
            g = np.exp(-d / (2.0 * sigma * sigma))
            weights -= (alpha * g)[:, :, None] * diff
            t += 1
        log.append(qe / n)
    return log
