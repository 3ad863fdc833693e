"""k-nearest-neighbor classifier with Laplace-smoothed vote fractions."""

import numpy as np

from alpipe.kernels import pairwise_sq_dists
from alpipe.learners.base import FittedModel


class KnnModel(FittedModel):
    def __init__(self, spec, X, y, n_classes):
        super().__init__(spec, X, y, n_classes)
        self.k = min(spec.resolved_params()["k"], X.shape[0])

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        d2 = pairwise_sq_dists(X, self.train_X)
        # stable argsort: distance ties resolve to the lower training index
        order = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        votes = np.zeros((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            votes[:, c] = np.sum(self.train_y[order] == c, axis=1)
        # 1/C virtual vote mass per class keeps rows strictly positive
        return (votes + 1.0 / self.n_classes) / (self.k + 1.0)


def fit_knn(spec, X, y, n_classes, rng):
    return KnnModel(spec, X, y, n_classes)
