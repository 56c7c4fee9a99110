"""Shared regression-tree kernel.

One numba-compiled builder serves both the random forest (fit targets
directly, no leaf regularization) and gradient boosting (fit residuals,
second-order leaf weights with an L2 term). Split search is exact greedy
gain maximization over midpoints between consecutive distinct sorted
values; with zero regularization this is exactly SSE minimization.

Tie-break: candidate features are scanned in ascending index order and
thresholds in ascending value order, and a split is accepted only on a
strict gain improvement, so the lowest feature index and then the lowest
threshold win ties.
"""

import numpy as np
from numba import njit

NO_FEATURE = -1


@njit(cache=True)
def _splitmix64(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def build_tree(X, target, row_idx, mtry, min_leaf, max_depth, l2, rng_seed):
    """Grow one tree over X[row_idx] fitting ``target``.

    Leaf value is sum(target) / (count + l2). ``max_depth < 0`` means
    unlimited. ``rng_seed`` drives the per-node feature subsampling when
    mtry < p (all features are used otherwise, consuming no randomness).

    Returns (feature, threshold, left, right, value) arrays; feature == -1
    marks a leaf.
    """
    n_rows = row_idx.shape[0]
    p = X.shape[1]
    max_nodes = 2 * n_rows + 1
    feature = np.full(max_nodes, NO_FEATURE, dtype=np.int32)
    threshold = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int32)
    right = np.full(max_nodes, -1, dtype=np.int32)
    value = np.zeros(max_nodes, dtype=np.float64)

    idx = row_idx.copy()
    stack = np.empty((max_nodes, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_rows
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    state = np.uint64(rng_seed)
    feat_pool = np.empty(p, dtype=np.int64)
    vals = np.empty(n_rows, dtype=np.float64)

    while top > 0:
        top -= 1
        node_id = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        size = end - start

        g_sum = 0.0
        for i in range(start, end):
            g_sum += target[idx[i]]
        value[node_id] = g_sum / (size + l2)
        if size < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue

        if mtry >= p:
            n_feats = p
            for j in range(p):
                feat_pool[j] = j
        else:
            for j in range(p):
                feat_pool[j] = j
            for j in range(mtry):
                state, z = _splitmix64(state)
                k = j + int(z % np.uint64(p - j))
                tmp = feat_pool[j]
                feat_pool[j] = feat_pool[k]
                feat_pool[k] = tmp
            n_feats = mtry
            feat_pool[:mtry].sort()

        parent_score = g_sum * g_sum / (size + l2)
        best_gain = 0.0
        best_feature = -1
        best_threshold = 0.0
        for fi in range(n_feats):
            f = feat_pool[fi]
            for i in range(size):
                vals[i] = X[idx[start + i], f]
            order = np.argsort(vals[:size])
            prefix = 0.0
            for s in range(size - 1):
                prefix += target[idx[start + order[s]]]
                if vals[order[s]] == vals[order[s + 1]]:
                    continue
                n_l = s + 1
                n_r = size - n_l
                if n_l < min_leaf or n_r < min_leaf:
                    continue
                g_l = prefix
                g_r = g_sum - prefix
                gain = (
                    g_l * g_l / (n_l + l2)
                    + g_r * g_r / (n_r + l2)
                    - parent_score
                )
                if gain > best_gain:
                    best_gain = gain
                    best_feature = f
                    best_threshold = 0.5 * (vals[order[s]] + vals[order[s + 1]])
        if best_feature < 0:
            continue

        lo = start
        hi = end - 1
        while lo <= hi:
            if X[idx[lo], best_feature] <= best_threshold:
                lo += 1
            else:
                tmp = idx[lo]
                idx[lo] = idx[hi]
                idx[hi] = tmp
                hi -= 1

        feature[node_id] = best_feature
        threshold[node_id] = best_threshold
        left[node_id] = n_nodes
        right[node_id] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = start
        stack[top, 2] = lo
        stack[top, 3] = depth + 1
        stack[top + 1, 0] = n_nodes + 1
        stack[top + 1, 1] = lo
        stack[top + 1, 2] = end
        stack[top + 1, 3] = depth + 1
        top += 2
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


@njit(cache=True)
def predict_tree(feature, threshold, left, right, value, X):
    n = X.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


class Tree:
    """Immutable fitted tree over contiguous float64 feature rows."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value

    @classmethod
    def fit(cls, X, target, row_idx, *, mtry, min_leaf, max_depth, l2=0.0, rng_seed=0):
        depth = -1 if max_depth is None else int(max_depth)
        arrays = build_tree(
            X, target, row_idx,
            int(mtry), int(min_leaf), depth, float(l2), np.uint64(rng_seed),
        )
        return cls(*arrays)

    def predict(self, X):
        return predict_tree(
            self.feature, self.threshold, self.left, self.right, self.value, X
        )
