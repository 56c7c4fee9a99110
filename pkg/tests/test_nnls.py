import numpy as np
import pytest

from aerostack.errors import MaxIterationsError, NonFiniteError
from aerostack.nnls import nnls


def kkt_holds(A, b, w):
    tol = 1e-8 * float(np.max(np.abs(A.T @ b)))
    gradient = A.T @ (A @ w - b)
    positive = w > 0
    return (
        np.all(np.abs(gradient[positive]) <= tol + 1e-12)
        and np.all(gradient[~positive] >= -tol - 1e-12)
    )


class TestSmallCases:
    def test_identity_matrix_copies_b(self):
        w = nnls(np.eye(2), np.array([0.3, 0.7]))
        np.testing.assert_allclose(w, [0.3, 0.7], atol=1e-12)

    def test_single_column_closed_form(self):
        A = np.array([[1.0], [1.0]])
        b = np.array([1.0, 3.0])
        # closed form: max(0, A.b / A.A) = 4 / 2
        np.testing.assert_allclose(nnls(A, b), [2.0], atol=1e-12)

    def test_negative_component_clipped(self):
        A = np.eye(2)
        b = np.array([-1.0, 2.0])
        w = nnls(A, b)
        # brute-force oracle over the nonnegative grid, step 1e-3
        W1, W2 = np.meshgrid(np.arange(0.0, 1.5, 1e-3), np.arange(0.0, 3.0, 1e-3), indexing="ij")
        resid = (W1 - b[0]) ** 2 + (W2 - b[1]) ** 2
        flat = int(np.argmin(resid))
        best = (W1.ravel()[flat], W2.ravel()[flat])
        np.testing.assert_allclose(w, best, atol=1e-3)
        np.testing.assert_allclose(w, [0.0, 2.0], atol=1e-12)

    def test_zero_rhs(self):
        np.testing.assert_array_equal(nnls(np.eye(3), np.zeros(3)), np.zeros(3))


class TestProperties:
    def test_kkt_and_projected_ols_domination(self):
        rng = np.random.default_rng(314)
        for _ in range(1000):
            n = int(rng.integers(1, 21))
            k = int(rng.integers(1, 6))
            A = rng.normal(size=(n, k))
            b = rng.normal(size=n)
            w = nnls(A, b)
            assert np.all(w >= 0.0)
            assert kkt_holds(A, b, w)
            # projected OLS: unconstrained least squares, negatives clipped
            ols = np.linalg.lstsq(A, b, rcond=None)[0]
            clipped = np.maximum(ols, 0.0)
            assert (
                np.linalg.norm(A @ w - b)
                <= np.linalg.norm(A @ clipped - b) + 1e-9
            )

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteError):
            nnls(np.array([[np.nan], [1.0]]), np.ones(2))

    def test_iteration_cap_enforced(self):
        A = np.eye(3)
        b = np.ones(3)
        with pytest.raises(MaxIterationsError):
            nnls(A, b, max_iter=0)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            nnls(np.eye(2), np.ones(3))
