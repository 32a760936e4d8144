"""Map activation, winner selection and neighborhood learning."""

import math

import numpy as np
import pytest

from somaction.errors import DimensionMismatch, EmptyTrainingSet
from somaction.som import (
    DEFAULT_ACTIVITY_SIGMA,
    SomGrid,
    TrainingSchedule,
    activity,
    adapt,
    neighborhood,
    net_input,
    train,
    winner,
)


def small_grid():
    w = np.array(
        [
            [[0.0, 0.0], [1.0, 0.0]],
            [[0.0, 1.0], [1.0, 1.0]],
        ]
    )
    return SomGrid(w.copy())


class TestActivation:
    def test_net_input_by_hand(self):
        g = small_grid()
        s = net_input(g, np.array([0.0, 0.0]))
        expect = np.array([[0.0, 1.0], [1.0, math.sqrt(2)]])
        assert np.allclose(s, expect, atol=1e-15)

    def test_activity_is_exp_of_scaled_distance(self):
        g = small_grid()
        x = np.array([0.3, 0.4])
        s = net_input(g, x)
        assert np.allclose(activity(g, x, sigma=2.0), np.exp(-s / 2.0), atol=1e-15)

    def test_activity_in_unit_interval(self):
        g = SomGrid.random(5, 7, 3, np.random.default_rng(0))
        a = activity(g, np.array([0.2, 0.9, 0.5]))
        assert np.all(a > 0.0) and np.all(a <= 1.0)

    def test_default_sigma_keeps_ordering(self):
        # The flattening transfer must not reorder units relative to
        # raw distance for realistic weight spreads.
        g = SomGrid.random(10, 10, 9, np.random.default_rng(1))
        x = np.random.default_rng(2).random(9)
        s = net_input(g, x)
        a = activity(g, x, DEFAULT_ACTIVITY_SIGMA)
        assert winner(a) == divmod(int(np.argmin(s)), 10)

    def test_dimension_checked(self):
        g = small_grid()
        with pytest.raises(DimensionMismatch):
            net_input(g, np.zeros(3))


class TestWinner:
    def test_unique_maximum(self):
        a = np.zeros((3, 4))
        a[2, 1] = 0.9
        assert winner(a) == (2, 1)

    def test_tie_breaks_row_major(self):
        a = np.zeros((3, 3))
        a[1, 2] = 1.0
        a[2, 0] = 1.0
        assert winner(a) == (1, 2)

    def test_all_equal_gives_origin(self):
        assert winner(np.ones((4, 4))) == (0, 0)


class TestAdapt:
    def test_single_update_by_hand(self):
        g = small_grid()
        x = np.array([0.0, 0.0])
        before = g.weights.copy()
        adapt(g, x, win=(0, 0), alpha=0.5, sigma=1.0)
        # Grid distances from (0,0): 0, 1, 1, sqrt(2).
        for (i, j), d in [((0, 0), 0.0), ((0, 1), 1.0), ((1, 0), 1.0), ((1, 1), math.sqrt(2))]:
            gain = 0.5 * math.exp(-d / 2.0)
            expect = before[i, j] + gain * (x - before[i, j])
            assert np.allclose(g.weights[i, j], expect, atol=1e-15)

    def test_winner_takes_largest_step_fraction(self):
        # moved/||w - x|| equals alpha*G, which peaks at the winner and
        # decays with grid distance from it.
        g = small_grid()
        x = np.array([0.25, 0.25])
        before = g.weights.copy()
        adapt(g, x, win=(0, 0), alpha=0.3, sigma=0.8)
        gap = np.linalg.norm(before - x, axis=2)
        frac = np.linalg.norm(g.weights - before, axis=2) / gap
        assert frac[0, 0] == frac.max()
        assert frac[1, 1] == frac.min()

    def test_squared_kernel_is_tighter(self):
        g = SomGrid(np.zeros((1, 5, 1)))
        plain = neighborhood(g, (0, 0), sigma=1.0, squared=False)
        tight = neighborhood(g, (0, 0), sigma=1.0, squared=True)
        assert plain[0, 0] == tight[0, 0] == 1.0
        assert np.all(tight[0, 2:] < plain[0, 2:])
        # Distance 3 under the squared kernel: exp(-9/2).
        assert np.isclose(tight[0, 3], math.exp(-4.5), atol=1e-15)

    def test_alpha_one_sigma_small_snaps_winner(self):
        g = small_grid()
        x = np.array([0.7, 0.2])
        adapt(g, x, win=(1, 1), alpha=1.0, sigma=1e-3)
        assert np.allclose(g.weights[1, 1], x, atol=1e-12)


class TestSchedule:
    def test_defaults_resolve_against_data(self):
        s = TrainingSchedule(epochs=10).resolve((30, 20), n_samples=50)
        assert s.sigma0 == 15.0
        assert s.tau_alpha == 250.0
        assert np.isclose(s.tau_sigma, 500.0 / math.log(15.0))

    def test_explicit_values_kept(self):
        s = TrainingSchedule(epochs=5, sigma0=3.0, tau_alpha=7.0, tau_sigma=9.0)
        r = s.resolve((10, 10), 100)
        assert (r.sigma0, r.tau_alpha, r.tau_sigma) == (3.0, 7.0, 9.0)

    def test_tiny_map_does_not_blow_up(self):
        r = TrainingSchedule(epochs=2).resolve((1, 1), 10)
        assert r.tau_sigma > 0


class TestTrain:
    def blobs(self, rng, n=120):
        centers = np.array([[0.2, 0.2], [0.8, 0.3], [0.5, 0.9]])
        picks = rng.integers(0, 3, size=n)
        return centers[picks] + rng.normal(scale=0.03, size=(n, 2))

    def test_quantization_error_drops(self):
        rng = np.random.default_rng(5)
        data = self.blobs(rng)
        g = SomGrid.random(6, 6, 2, rng)
        log = train(g, data, TrainingSchedule(epochs=40), rng)
        assert len(log) == 40
        assert log[-1] < 0.5 * log[0]
        assert np.all(np.isfinite(g.weights))

    def test_deterministic_given_seed(self):
        data = self.blobs(np.random.default_rng(6))
        g1 = SomGrid.random(5, 5, 2, np.random.default_rng(7))
        g2 = SomGrid.random(5, 5, 2, np.random.default_rng(7))
        train(g1, data, TrainingSchedule(epochs=10), np.random.default_rng(8))
        train(g2, data, TrainingSchedule(epochs=10), np.random.default_rng(8))
        assert np.array_equal(g1.weights, g2.weights)

    def test_neighbors_end_up_similar(self):
        # After organizing on a uniform square, adjacent units should be
        # much closer in weight space than arbitrary unit pairs.
        rng = np.random.default_rng(9)
        data = rng.random((300, 2))
        g = SomGrid.random(8, 8, 2, rng)
        train(g, data, TrainingSchedule(epochs=30), rng)
        w = g.weights
        adjacent = np.concatenate(
            [
                np.linalg.norm(w[1:, :] - w[:-1, :], axis=2).ravel(),
                np.linalg.norm(w[:, 1:] - w[:, :-1], axis=2).ravel(),
            ]
        )
        flat = w.reshape(-1, 2)
        far = np.linalg.norm(flat[None, :, :] - flat[:, None, :], axis=2)
        assert adjacent.mean() < 0.5 * far.mean()

    def test_zero_epochs_leave_grid_unchanged(self):
        g = SomGrid.random(4, 4, 2, np.random.default_rng(13))
        before = g.weights.copy()
        log = train(g, np.random.default_rng(14).random((10, 2)),
                    TrainingSchedule(epochs=0), np.random.default_rng(0))
        assert log == []
        assert np.array_equal(g.weights, before)

    def test_single_repeated_input_pulls_winner_onto_it(self):
        rng = np.random.default_rng(15)
        g = SomGrid.random(4, 4, 3, rng)
        x = np.array([0.3, 0.6, 0.9])
        train(g, np.tile(x, (5, 1)), TrainingSchedule(epochs=200), rng)
        s = net_input(g, x)
        assert s.min() < 1e-3

    def test_two_clusters_get_distinct_contiguous_winners(self):
        rng = np.random.default_rng(16)
        a = np.array([0.15, 0.15]) + rng.normal(scale=0.02, size=(60, 2))
        b = np.array([0.85, 0.85]) + rng.normal(scale=0.02, size=(60, 2))
        data = np.vstack([a, b])
        g = SomGrid.random(10, 10, 2, rng)
        train(g, data, TrainingSchedule(epochs=60), rng)
        wins_a = {winner(activity(g, x)) for x in a}
        wins_b = {winner(activity(g, x)) for x in b}
        assert wins_a.isdisjoint(wins_b)
        # Contiguity: every winner of a cluster has another winner of the
        # same cluster within a couple of grid steps (or is alone).
        for wins in (wins_a, wins_b):
            if len(wins) == 1:
                continue
            for w in wins:
                others = wins - {w}
                d = min(abs(w[0] - o[0]) + abs(w[1] - o[1]) for o in others)
                assert d <= 3

    def test_weights_stay_in_unit_cube_during_training(self):
        rng = np.random.default_rng(17)
        g = SomGrid.random(6, 6, 3, rng)
        data = rng.random((80, 3))
        train(g, data, TrainingSchedule(epochs=50), rng)
        assert np.all(g.weights >= 0.0) and np.all(g.weights <= 1.0)

    def test_empty_data_rejected(self):
        g = small_grid()
        with pytest.raises(EmptyTrainingSet):
            train(g, np.zeros((0, 2)), TrainingSchedule(epochs=1), np.random.default_rng(0))

    def test_wrong_dim_rejected(self):
        g = small_grid()
        with pytest.raises(DimensionMismatch):
            train(g, np.zeros((4, 3)), TrainingSchedule(epochs=1), np.random.default_rng(0))


class TestGrid:
    def test_random_init_in_unit_cube(self):
        g = SomGrid.random(4, 3, 5, np.random.default_rng(11))
        assert g.weights.shape == (4, 3, 5)
        assert np.all(g.weights >= 0.0) and np.all(g.weights < 1.0)

    def test_distance_table_symmetric(self):
        g = SomGrid.random(3, 4, 2, np.random.default_rng(12))
        table = g.grid_distances()
        assert table.shape == (12, 3, 4)
        flatview = table.reshape(12, 12)
        assert np.allclose(flatview, flatview.T, atol=0)
        assert np.allclose(np.diag(flatview), 0.0, atol=0)

    def test_bad_shapes_rejected(self):
        with pytest.raises(ValueError):
            SomGrid(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            SomGrid.random(0, 3, 2, np.random.default_rng(0))
