"""Permutation feature importance measured as RMSE loss.

Each feature column of the evaluation matrix is shuffled a fixed number of
times with a seeded PRNG (the model is never refit); the importance of the
feature is the mean increase of RMSE over the unpermuted baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import rmse


@dataclass(frozen=True)
class ImportanceEntry:
    feature: str
    mean_rmse_loss: float
    sd_rmse_loss: float
    rank: int


def permutation_importance(model, matrix, n_perm: int = 10, seed: int = 0) -> list[ImportanceEntry]:
    """Rank every feature in ``matrix`` by mean permuted-RMSE increase.

    ``model`` is anything with a ``predict(matrix)`` method (a fitted
    regressor or a whole stack). Results are deterministic for a given
    seed; entries come back ordered rank 1..p by descending mean loss,
    ties resolved by schema order.
    """
    if n_perm < 1:
        raise ValueError("n_perm must be >= 1")
    baseline = rmse(model.predict(matrix), matrix.y)
    rng = np.random.default_rng(seed)
    n = matrix.n_rows

    losses = []
    for j, name in enumerate(matrix.feature_names):
        permuted_rmse = np.empty(n_perm)
        for t in range(n_perm):
            order = rng.permutation(n)
            X = matrix.X.copy()
            X[:, j] = X[order, j]
            permuted_rmse[t] = rmse(model.predict(matrix.with_X(X)), matrix.y)
        losses.append((name, permuted_rmse - baseline))

    ranked = sorted(
        enumerate(losses), key=lambda item: (-float(np.mean(item[1][1])), item[0])
    )
    return [
        ImportanceEntry(
            feature=name,
            mean_rmse_loss=float(np.mean(loss)),
            sd_rmse_loss=float(np.std(loss)),
            rank=rank,
        )
        for rank, (_, (name, loss)) in enumerate(ranked, start=1)
    ]
