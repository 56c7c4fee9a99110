import math

import numpy as np
import pytest

from aerostack.errors import EmptyInputError, LengthMismatchError, ZeroVarianceError
from aerostack.metrics import fractional_ranks, r_squared, rmse, spearman


class TestRmse:
    def test_identical_vectors(self):
        assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_hand_arithmetic(self):
        # mean squared error (9 + 16) / 2 = 12.5
        assert abs(rmse([0.0, 0.0], [3.0, 4.0]) - math.sqrt(12.5)) <= 1e-9

    def test_single_pair(self):
        assert rmse([5.0], [3.0]) == 2.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            rmse([1.0], [1.0, 2.0])

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            rmse([], [])


class TestRSquared:
    def test_perfect_prediction(self):
        assert r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0

    def test_mean_prediction_scores_zero(self):
        obs = [1.0, 2.0, 3.0, 6.0]
        mean = sum(obs) / len(obs)
        assert abs(r_squared([mean] * 4, obs)) <= 1e-12

    def test_hand_sums_of_squares(self):
        # ss_res = 1, ss_tot = 2
        assert abs(r_squared([1.0, 2.0, 4.0], [1.0, 2.0, 3.0]) - 0.5) <= 1e-9

    def test_can_be_negative(self):
        assert r_squared([10.0, -10.0, 10.0], [1.0, 2.0, 3.0]) < 0.0

    def test_constant_observations_rejected(self):
        with pytest.raises(ZeroVarianceError):
            r_squared([1.0, 2.0], [5.0, 5.0])

    def test_one_iff_exact(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            obs = rng.normal(size=10)
            pred = obs.copy()
            assert r_squared(pred, obs) == 1.0
            pred[3] += 1e-4
            assert r_squared(pred, obs) < 1.0 - 1e-12


class TestSpearman:
    def test_strictly_monotone(self):
        x = [1.0, 2.0, 5.0, 9.0]
        assert abs(spearman(x, [2.0, 3.0, 8.0, 9.0]) - 1.0) <= 1e-12
        assert abs(spearman(x, [-1.0, -2.0, -3.0, -4.0]) + 1.0) <= 1e-12

    def test_rank_difference_formula_no_ties(self):
        # oracle: 1 - 6 * sum(d^2) / (n(n^2-1)) with d = rank differences
        x = [1.0, 2.0, 3.0, 4.0]
        y = [1.0, 3.0, 2.0, 4.0]
        d_squared = 0 + 1 + 1 + 0
        expected = 1.0 - 6.0 * d_squared / (4 * 15)
        assert abs(spearman(x, y) - expected) <= 1e-9
        assert abs(spearman(x, y) - 0.8) <= 1e-9

    def test_tie_handling_average_ranks(self):
        np.testing.assert_allclose(fractional_ranks([3.0, 1.0, 1.0, 2.0]), [4.0, 1.5, 1.5, 3.0])
        # with ties, use Pearson-of-ranks as the oracle
        x = np.array([1.0, 1.0, 2.0, 3.0])
        y = np.array([2.0, 4.0, 4.0, 5.0])
        rx, ry = fractional_ranks(x), fractional_ranks(y)
        expected = np.corrcoef(rx, ry)[0, 1]
        assert abs(spearman(x, y) - expected) <= 1e-12

    def test_monotone_invariance(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(3, 40))
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            base = spearman(x, y)
            assert abs(spearman(np.exp(x), y**3) - base) <= 1e-12

    def test_zero_variance_ranks(self):
        with pytest.raises(ZeroVarianceError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
