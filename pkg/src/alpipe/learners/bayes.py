"""Gaussian naive Bayes with floored per-class variances."""

import numpy as np

from alpipe.learners.base import FittedModel


class GnbModel(FittedModel):
    def __init__(self, spec, X, y, n_classes):
        super().__init__(spec, X, y, n_classes)
        floor = spec.resolved_params()["var_floor"]
        d = X.shape[1]
        self.means = np.zeros((n_classes, d))
        self.vars = np.full((n_classes, d), floor)
        counts = np.bincount(y, minlength=n_classes).astype(np.float64)
        self.log_prior = np.log(counts / counts.sum() + 1e-300)
        for c in range(n_classes):
            rows = X[y == c]
            if rows.shape[0] == 0:
                # unseen class keeps zero mean / floored variance; its prior
                # log(0) already pushes the posterior to ~0
                continue
            self.means[c] = rows.mean(axis=0)
            self.vars[c] = np.maximum(rows.var(axis=0), floor)

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        log_lik = np.empty((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            diff = X - self.means[c]
            log_lik[:, c] = -0.5 * np.sum(
                np.log(2.0 * np.pi * self.vars[c]) + diff * diff / self.vars[c],
                axis=1,
            )
        Z = log_lik + self.log_prior
        Z -= Z.max(axis=1, keepdims=True)
        P = np.exp(Z)
        return P / P.sum(axis=1, keepdims=True)


def fit_gnb(spec, X, y, n_classes, rng):
    return GnbModel(spec, X, y, n_classes)
