"""Random forest regressor: bootstrapped trees, per-node feature subsets,
leaf value = mean of training targets in the leaf."""

import math

import numpy as np

from ..errors import ConfigError
from ._tree import Tree


class RandomForestModel:
    __slots__ = ("trees",)

    def __init__(self, trees):
        self.trees = trees

    def predict_array(self, X):
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)


def fit_forest(params, X, y, seed):
    n, p = X.shape
    mtry = params.mtry if params.mtry is not None else math.ceil(p / 3)
    if not 1 <= mtry <= p:
        raise ConfigError(f"mtry must be in [1, {p}], got {mtry}")

    trees = []
    all_rows = np.arange(n, dtype=np.int64)
    for tree_index in range(params.n_trees):
        # per-tree PRNG stream keeps results independent of fit scheduling
        rng = np.random.default_rng(seed + tree_index)
        rows = rng.integers(0, n, n, dtype=np.int64) if params.bootstrap else all_rows
        subset_seed = rng.integers(0, 2**64, dtype=np.uint64)
        trees.append(Tree.fit(
            X, y, rows,
            mtry=mtry, min_leaf=params.min_leaf, max_depth=params.max_depth,
            l2=0.0, rng_seed=subset_seed,
        ))
    return RandomForestModel(trees)
