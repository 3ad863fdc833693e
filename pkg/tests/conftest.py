import numpy as np
import pytest

from alpipe.core import Dataset


def make_gaussian_dataset(n=300, n_classes=2, d=2, spread=1.5, seed=0,
                          source_id="synthetic"):
    """Well-separated Gaussian blobs, one per class."""
    rng = np.random.default_rng(seed)
    X, y = [], []
    for c in range(n_classes):
        per = n // n_classes + (1 if c < n % n_classes else 0)
        center = np.zeros(d)
        center[c % d] = c * spread
        X.append(rng.normal(center, 1.0, size=(per, d)))
        y.extend([c] * per)
    X = np.vstack(X)
    return Dataset(
        features=X,
        labels=np.array(y),
        n_classes=n_classes,
        source_id=source_id,
        feature_names=tuple(f"f{i}" for i in range(d)),
    )


@pytest.fixture
def gaussian_dataset():
    return make_gaussian_dataset()
