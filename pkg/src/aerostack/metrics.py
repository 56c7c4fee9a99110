"""Error metrics and rank correlation."""

import numpy as np

from .errors import EmptyInputError, LengthMismatchError,NonFiniteError, ZeroVarianceError


def _paired_arrays(a, b, min_length=1):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatchError(f"expected equal-length vectors, got {a.shape} and {b.shape}")
    if a.size == 0:
        raise EmptyInputError("empty input")
    if a.size < min_length:
        raise LengthMismatchError(f"need at least {min_length} pairs, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NonFiniteError("inputs must be finite")
    return a, b


def rmse(pred, obs) -> float:
    pred, obs = _paired_arrays(pred, obs)
    return float(np.sqrt(np.mean((pred - obs) ** 2)))


def r_squared(pred, obs) -> float:
    """1 - SS_res / SS_tot about the observation mean; negative when the
    predictions do worse than that mean."""
    pred, obs = _paired_arrays(pred, obs, min_length=2)
    ss_tot = float(np.sum((obs - obs.mean()) ** 2))
    if ss_tot == 0.0:
        raise ZeroVarianceError("observations are constant; R^2 undefined")
    ss_res = float(np.sum((obs - pred) ** 2))
    return 1.0 - ss_res / ss_tot


def fractional_ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the average of their rank span."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Pearson correlation of average-tie fractional ranks."""
    x, y = _paired_arrays(x, y, min_length=2)
    rx = fractional_ranks(x)
    ry = fractional_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.sqrt(np.sum(dx * dx)))
    sy = float(np.sqrt(np.sum(dy * dy)))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVarianceError("a rank vector is constant; correlation undefined")
    return float(np.sum(dx * dy) / (sx * sy))
