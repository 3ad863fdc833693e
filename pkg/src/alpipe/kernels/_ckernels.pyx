# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pairwise distances, min-distance updates, Gini split scan."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def pairwise_sq_dists(a, b):
    """Squared Euclidean distances between rows of a (n,d) and b (m,d)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] B = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], d = A.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, m), dtype=np.float64)
    cdef Py_ssize_t i, j, k
    cdef double s, diff
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(d):
                diff = A[i, k] - B[j, k]
                s += diff * diff
            out[i, j] = s
    return out


def update_min_sq_dists(min_d, pts, x):
    """In-place: min_d[i] = min(min_d[i], ||pts[i] - x||^2)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] M = min_d
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P = np.ascontiguousarray(pts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] X = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1]
    cdef Py_ssize_t i, k
    cdef double s, diff
    for i in range(n):
        s = 0.0
        for k in range(d):
            diff = P[i, k] - X[k]
            s += diff * diff
        if s < M[i]:
            M[i] = s
    return min_d


def best_gini_split(X, y, feature_ids, n_classes):
    """Best axis-aligned split by weighted Gini impurity.

    Same contract as alpipe.kernels.pure.best_gini_split.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Xc = np.ascontiguousarray(X, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] yc = np.ascontiguousarray(y, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] feats = np.ascontiguousarray(feature_ids, dtype=np.int64)
    cdef Py_ssize_t n = Xc.shape[0]
    cdef int C = n_classes
    cdef cnp.ndarray[cnp.float64_t, ndim=1] countsL = np.empty(C, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] countsT = np.zeros(C, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order
    cdef cnp.ndarray[cnp.float64_t, ndim=1] col
    cdef double best_score = np.inf, best_thr = 0.0
    cdef Py_ssize_t best_feat = -1
    cdef Py_ssize_t fi, f, i, c
    cdef double nL, nR, ssqL, ssqR, score, cl
    for c in range(C):
        countsT[c] = 0.0
    for i in range(n):
        countsT[yc[i]] += 1.0
    for fi in range(feats.shape[0]):
        f = feats[fi]
        col = Xc[:, f].copy()
        order = np.argsort(col, kind="stable")
        for c in range(C):
            countsL[c] = 0.0
        for i in range(n - 1):
            countsL[yc[order[i]]] += 1.0
            if col[order[i + 1]] > col[order[i]]:
                nL = i + 1.0
                nR = n - nL
                ssqL = 0.0
                ssqR = 0.0
                for c in range(C):
                    cl = countsL[c]
                    ssqL += cl * cl
                    cl = countsT[c] - cl
                    ssqR += cl * cl
                score = (nL - ssqL / nL) + (nR - ssqR / nR)
                if score < best_score:
                    best_score = score
                    best_feat = f
                    best_thr = (col[order[i]] + col[order[i + 1]]) / 2.0
    return best_feat, best_thr, best_score
