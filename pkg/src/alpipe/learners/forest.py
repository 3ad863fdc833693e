"""CART decision trees, random forest, and extremely randomized trees.

Trees are grown to purity (or single-row leaves) with Gini split selection
on sqrt(d) candidate features per node. Forests bootstrap-resample; extra
trees use the full sample with uniformly random split thresholds.
"""

import math

import numpy as np

from alpipe.kernels import best_gini_split
from alpipe.learners.base import FittedModel, TimeBudget


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "dist")

    def __init__(self):
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.dist = None


def _leaf(y, n_classes):
    node = _Node()
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    node.dist = counts / counts.sum()
    return node


def _random_split(X, y, feats, n_classes, rng):
    """Extra-trees split: one uniform threshold per candidate feature."""
    n = X.shape[0]
    counts_total = np.bincount(y, minlength=n_classes).astype(np.float64)
    best = (np.inf, -1, 0.0)
    for f in feats:
        col = X[:, f]
        lo, hi = col.min(), col.max()
        if lo == hi:
            continue
        thr = lo + (hi - lo) * float(rng.uniform())
        mask = col <= thr
        nL = int(mask.sum())
        if nL == 0 or nL == n:
            continue
        cL = np.bincount(y[mask], minlength=n_classes).astype(np.float64)
        cR = counts_total - cL
        score = (nL - np.sum(cL * cL) / nL) + (
            (n - nL) - np.sum(cR * cR) / (n - nL)
        )
        if score < best[0]:
            best = (float(score), int(f), float(thr))
    return best[1], best[2], best[0]


def _grow_tree(X, y, n_classes, rng, extra):
    d = X.shape[1]
    m = max(1, math.isqrt(d))
    root = _Node()
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        sub_y = y[idx]
        if idx.size <= 1 or np.all(sub_y == sub_y[0]):
            node.dist = _leaf(sub_y, n_classes).dist
            continue
        feats = rng.choice(d, size=m, replace=False)
        sub_X = X[idx]
        if extra:
            f, thr, _ = _random_split(sub_X, sub_y, feats, n_classes, rng)
        else:
            f, thr, _ = best_gini_split(
                sub_X, sub_y, np.asarray(feats, dtype=np.int64), n_classes
            )
        if f < 0:
            node.dist = _leaf(sub_y, n_classes).dist
            continue
        mask = sub_X[:, f] <= thr
        node.feature = int(f)
        node.threshold = float(thr)
        node.left = _Node()
        node.right = _Node()
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return root


def _tree_proba(root, X, n_classes):
    out = np.empty((X.shape[0], n_classes))
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.dist is not None:
            out[idx] = node.dist
            continue
        mask = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out


class ForestModel(FittedModel):
    def __init__(self, spec, X, y, n_classes, trees):
        super().__init__(spec, X, y, n_classes)
        self.trees = trees

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += _tree_proba(tree, X, self.n_classes)
        return acc / len(self.trees)

    def group_proba(self, X, n_groups):
        """Per-group mean predictions over an M-way partition of the trees."""
        X = np.asarray(X, dtype=np.float64)
        groups = np.array_split(np.arange(len(self.trees)), n_groups)
        out = []
        for grp in groups:
            if grp.size == 0:
                continue
            acc = np.zeros((X.shape[0], self.n_classes))
            for t in grp:
                acc += _tree_proba(self.trees[t], X, self.n_classes)
            out.append(acc / grp.size)
        return out


def _fit_forest(spec, X, y, n_classes, rng, extra):
    n = X.shape[0]
    n_trees = spec.resolved_params()["n_trees"]
    budget = TimeBudget(spec.fit_time_cap_seconds)
    trees = []
    for _ in range(n_trees):
        if trees and budget.expired():
            break
        if extra:
            bx, by = X, y
        else:
            boot = rng.integers(0, n, size=n)
            bx, by = X[boot], y[boot]
        trees.append(_grow_tree(bx, by, n_classes, rng, extra))
    return ForestModel(spec, X, y, n_classes, trees)


def fit_random_forest(spec, X, y, n_classes, rng):
    return _fit_forest(spec, X, y, n_classes, rng, extra=False)


def fit_extra_trees(spec, X, y, n_classes, rng):
    return _fit_forest(spec, X, y, n_classes, rng, extra=True)
