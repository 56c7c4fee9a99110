"""Gradient-boosted trees with squared loss.

Stage-wise fit of residuals; leaf weight is the second-order optimum
sum(residual) / (count + l2_leaf), accumulated with shrinkage on top of a
base score equal to the training-target mean. No row or column subsampling.
"""

import numpy as np

from ._tree import Tree


class BoostedTreesModel:
    __slots__ = ("base_score", "learning_rate", "trees")

    def __init__(self, base_score, learning_rate, trees):
        self.base_score = base_score
        self.learning_rate = learning_rate
        self.trees = trees

    def predict_array(self, X):
        out = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out


def fit_boosted_trees(params, X, y, seed):
    n, p = X.shape
    base_score = float(np.mean(y))
    predictions = np.full(n, base_score)
    all_rows = np.arange(n, dtype=np.int64)

    trees = []
    for _ in range(params.n_rounds):
        residual = y - predictions
        tree = Tree.fit(
            X, residual, all_rows,
            mtry=p, min_leaf=params.min_leaf, max_depth=params.max_depth,
            l2=params.l2_leaf, rng_seed=0,
        )
        predictions += params.learning_rate * tree.predict(X)
        trees.append(tree)
    return BoostedTreesModel(base_score, params.learning_rate, trees)
