"""The estimators this adapter can host.

Each entry names a scikit-learn estimator factory plus adapter-level
policy: an optional training-row cap (for prior-fitted tabular models
that only accept a bounded context, subsampled uniformly and
seed-deterministically) and whether the estimator exposes an embedding.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier
from sklearn.linear_model import LogisticRegression
from sklearn.neural_network import MLPClassifier
from sklearn.svm import SVC

TABULAR_ROW_CAP = 1000


@dataclass(frozen=True)
class EstimatorEntry:
    factory: object  # callable(seed) -> unfitted estimator
    row_cap: int | None = None
    has_embed: bool = False


ESTIMATORS = {
    "logreg": EstimatorEntry(
        factory=lambda seed: LogisticRegression(max_iter=1000),
    ),
    "svm": EstimatorEntry(
        factory=lambda seed: SVC(probability=True, random_state=seed),
    ),
    "gbdt": EstimatorEntry(
        factory=lambda seed: GradientBoostingClassifier(random_state=seed),
    ),
    "mlp": EstimatorEntry(
        factory=lambda seed: MLPClassifier(
            hidden_layer_sizes=(64,), max_iter=500, random_state=seed
        ),
        has_embed=True,
    ),
    # prior-fitted tabular model stand-in: bounded training context,
    # filled by uniform seed-deterministic subsampling
    "tabular": EstimatorEntry(
        factory=lambda seed: GradientBoostingClassifier(random_state=seed),
        row_cap=TABULAR_ROW_CAP,
    ),
}


def subsample_rows(n_rows: int, cap: int, seed: int) -> np.ndarray:
    """Uniform without-replacement row subsample for row-capped estimators.

    Pure function of (n_rows, cap, seed); returns sorted indices, all rows
    when the cap is not exceeded.
    """
    if n_rows <= cap:
        return np.arange(n_rows)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n_rows, size=cap, replace=False))


def mlp_embedding(estimator: MLPClassifier, X: np.ndarray) -> np.ndarray:
    """Activations of the last hidden layer."""
    H = np.asarray(X, dtype=np.float64)
    for W, b in zip(estimator.coefs_[:-1], estimator.intercepts_[:-1]):
        H = np.maximum(H @ W + b, 0.0)
    return H
