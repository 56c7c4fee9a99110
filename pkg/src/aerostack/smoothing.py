"""Locally weighted degree-1 regression with tricube weights."""

import math

import numpy as np

from .errors import InputError, LengthMismatchError, NonFiniteError


def loess_smooth(x, y, span: float = 0.2) -> np.ndarray:
    """Fit a local linear regression at every point.

    At each x_i the q = ceil(span * n) nearest neighbors on the x axis get
    tricube weights of their distance scaled by the furthest neighbor, and
    a weighted straight line evaluated at x_i gives the fitted value.
    Degenerate neighborhoods (all neighbor x equal, or all weights zero)
    fall back to the (weighted) neighbor mean.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError(f"expected equal-length vectors, got {x.shape} and {y.shape}")
    n = x.size
    if n < 2:
        raise InputError("need at least 2 points to smooth")
    if not 0.0 < span <= 1.0:
        raise InputError(f"span must be in (0, 1], got {span}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteError("inputs must be finite")

    q = math.ceil(span * n)
    fitted = np.empty(n)
    for i in range(n):
        dist = np.abs(x - x[i])
        neighbors = np.argsort(dist, kind="stable")[:q]
        d = dist[neighbors]
        d_max = d[-1]
        if d_max == 0.0:
            fitted[i] = float(np.mean(y[neighbors]))
            continue
        w = (1.0 - (d / d_max) ** 3) ** 3
        s = float(w.sum())
        if s == 0.0:
            fitted[i] = float(np.mean(y[neighbors]))
            continue
        fitted[i] = _weighted_line_at(x[neighbors], y[neighbors], w, x[i], s)
    return fitted


def _weighted_line_at(xs, ys, w, x0, w_sum):
    x_bar = float(np.dot(w, xs)) / w_sum
    y_bar = float(np.dot(w, ys)) / w_sum
    dx = xs - x_bar
    sxx = float(np.dot(w, dx * dx))
    if sxx == 0.0:
        return y_bar
    slope = float(np.dot(w, dx * (ys - y_bar))) / sxx
    return y_bar + slope * (x0 - x_bar)
