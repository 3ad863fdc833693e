"""Numpy implementations of the hot kernels.

Used when the compiled extension is unavailable (or forced off via
ALPIPE_PURE_PYTHON=1). Same call signatures and semantics as _ckernels.
"""

import numpy as np


def pairwise_sq_dists(a, b):
    """Squared Euclidean distances between rows of a (n,d) and b (m,d)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    aa = np.sum(a * a, axis=1)[:, None]
    bb = np.sum(b * b, axis=1)[None, :]
    d2 = aa + bb - 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def update_min_sq_dists(min_d, pts, x):
    """In-place: min_d[i] = min(min_d[i], ||pts[i] - x||^2)."""
    d2 = pts - x[None, :]
    d2 = np.sum(d2 * d2, axis=1)
    np.minimum(min_d, d2, out=min_d)
    return min_d


def best_gini_split(X, y, feature_ids, n_classes):
    """Best axis-aligned split by weighted Gini impurity.

    Scans the given feature columns; candidate thresholds are midpoints
    between consecutive distinct sorted values. Minimized score is
    nL*gini(L) + nR*gini(R) written as (nL - ssqL/nL) + (nR - ssqR/nR)
    with ssq the sum of squared class counts. Ties resolve to the earlier
    feature in feature_ids, then the lowest boundary index.

    Returns (feature, threshold, score); feature == -1 when no column
    admits a valid split.
    """
    n = X.shape[0]
    onehot = np.zeros((n, n_classes), dtype=np.float64)
    onehot[np.arange(n), y] = 1.0
    best_score = np.inf
    best_feat = -1
    best_thr = 0.0
    for f in feature_ids:
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        v = col[order]
        boundaries = np.nonzero(v[1:] > v[:-1])[0]
        if boundaries.size == 0:
            continue
        cum = np.cumsum(onehot[order], axis=0)
        total = cum[-1]
        nL = boundaries + 1.0
        nR = n - nL
        cumL = cum[boundaries]
        ssqL = np.sum(cumL * cumL, axis=1)
        cumR = total[None, :] - cumL
        ssqR = np.sum(cumR * cumR, axis=1)
        score = (nL - ssqL / nL) + (nR - ssqR / nR)
        j = int(np.argmin(score))
        if score[j] < best_score:
            b = int(boundaries[j])
            best_score = float(score[j])
            best_feat = int(f)
            best_thr = (v[b] + v[b + 1]) / 2.0
    return best_feat, best_thr, best_score
