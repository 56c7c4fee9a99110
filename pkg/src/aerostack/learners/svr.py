"""Linear epsilon-insensitive support vector regression.

Minimizes 0.5*||w||^2 + C * sum(max(0, |y - (w.z + b)| - epsilon)) over
internally standardized features z. The solver is deterministic cyclic
coordinate descent: each sweep updates the intercept, then every weight,
moving each coordinate to the exact minimizer of its one-dimensional
convex restriction. Stops when no coordinate moved more than ``tol`` or
after ``max_epochs`` sweeps.
"""

import numpy as np


class LinearSvrModel:
    __slots__ = ("weights", "intercept", "means", "sds", "epochs_run")

    def __init__(self, weights, intercept, means, sds, epochs_run):
        self.weights = weights
        self.intercept = intercept
        self.means = means
        self.sds = sds
        self.epochs_run = epochs_run

    @property
    def coef(self):
        """Weights mapped back to raw feature space."""
        return self.weights / self.sds

    @property
    def intercept_raw(self):
        return self.intercept - float(np.dot(self.coef, self.means))

    def predict_array(self, X):
        return X @ self.coef + self.intercept_raw


def _intercept_step(c, epsilon):
    # minimizer of sum(max(0, |c_i - b| - epsilon)): midpoint of the flat
    # optimum, i.e. the middle of the sorted 2n breakpoints c_i -/+ epsilon
    events = np.sort(np.concatenate([c - epsilon, c + epsilon]))
    n = c.shape[0]
    return 0.5 * (events[n - 1] + events[n])


def _weight_step(z, c, cost, epsilon):
    """Exact minimizer of h(u) = 0.5*u^2 + C*sum(max(0, |c_i - u*z_i| - epsilon)).

    h' is strictly increasing and piecewise linear with slope 1 between the
    breakpoints (c_i -/+ eps)/z_i, where the hinge-slope term jumps up by
    |z_i|. Scanning breakpoints in order locates the unique zero exactly.
    """
    keep = z != 0.0
    if not np.any(keep):
        return 0.0
    zi = z[keep]
    ci = c[keep]
    abs_z = np.abs(zi)
    slope_sum = float(abs_z.sum())

    points = np.concatenate([(ci - epsilon) / zi, (ci + epsilon) / zi])
    jumps = np.concatenate([abs_z, abs_z])
    order = np.argsort(points, kind="stable")
    points = points[order]
    # hinge-slope term immediately right of each breakpoint
    slope_after = np.cumsum(jumps[order]) - slope_sum
    deriv_after = points + cost * slope_after

    crossing = int(np.argmax(deriv_after >= 0.0))
    if deriv_after[crossing] < 0.0:  # zero lies beyond the last breakpoint
        return -cost * float(slope_after[-1])
    if crossing == 0:
        return min(cost * slope_sum, float(points[0]))
    u = -cost * float(slope_after[crossing - 1])
    return float(min(max(u, points[crossing - 1]), points[crossing]))


def fit_svr(params, X, y, seed):
    n, p = X.shape
    means = X.mean(axis=0)
    sds = X.std(axis=0, ddof=1) if n > 1 else np.zeros(p)
    sds = np.where(sds > 0.0, sds, 1.0)
    Z = (X - means) / sds

    w = np.zeros(p)
    b = 0.0
    fitted = np.zeros(n)
    epochs_run = 0
    for epoch in range(params.max_epochs):
        epochs_run = epoch + 1
        largest_move = 0.0

        new_b = _intercept_step(y - fitted, params.epsilon)
        largest_move = abs(new_b - b)
        b = new_b

        for j in range(p):
            z = Z[:, j]
            c = y - b - (fitted - w[j] * z)
            new_wj = _weight_step(z, c, params.c, params.epsilon)
            move = abs(new_wj - w[j])
            if move > largest_move:
                largest_move = move
            fitted += (new_wj - w[j]) * z
            w[j] = new_wj

        if largest_move <= params.tol:
            break
    return LinearSvrModel(w, b, means, sds, epochs_run)
