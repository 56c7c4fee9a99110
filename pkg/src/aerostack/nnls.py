"""Nonnegative least squares by the Lawson-Hanson active-set method."""

import numpy as np

from .errors import MaxIterationsError, NonFiniteError


def nnls(A, b, tol=None, max_iter=None):
    """Minimize ||A w - b||^2 subject to w >= 0.

    At the solution the KKT conditions hold: |grad_i| <= tol for w_i > 0
    and grad_i >= -tol for w_i = 0, where grad = A^T (A w - b) and the
    default tol is 1e-8 * max|A^T b|. ``max_iter`` defaults to the
    defensive cap of 3 * n_columns active-set iterations.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: A {A.shape}, b {b.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NonFiniteError("nnls inputs must be finite")
    n, k = A.shape
    if n < 1 or k < 1:
        raise ValueError("nnls needs at least one row and one column")
    if tol is None:
        tol = 1e-8 * float(np.max(np.abs(A.T @ b)))
    if max_iter is None:
        max_iter = 3 * k

    w = np.zeros(k)
    passive = np.zeros(k, dtype=bool)
    gradient = A.T @ b  # negative objective gradient at w = 0
    iterations = 0

    while not passive.all():
        candidates = np.where(~passive, gradient, -np.inf)
        j = int(np.argmax(candidates))
        if candidates[j] <= tol:
            break
        passive[j] = True

        while True:
            if iterations >= max_iter:
                raise MaxIterationsError(f"nnls failed to converge in {max_iter} iterations")
            iterations += 1
            z = np.zeros(k)
            cols = np.flatnonzero(passive)
            z[cols] = np.linalg.lstsq(A[:, cols], b, rcond=None)[0]
            if np.all(z[cols] > 0.0):
                w = z
                break
            # step toward z until the first passive coordinate hits zero
            blocking = cols[z[cols] <= 0.0]
            denom = w[blocking] - z[blocking]
            ratios = np.where(denom > 0.0, w[blocking] / np.where(denom > 0.0, denom, 1.0), 0.0)
            alpha = float(np.min(ratios))
            w = w + alpha * (z - w)
            zero_tol = 1e-12 * max(1.0, float(np.max(np.abs(w))))
            passive[cols[w[cols] <= zero_tol]] = False
            w[~passive] = 0.0
        gradient = A.T @ (b - A @ w)
    return w
