"""Learner contract: specs, fitted-model base class, time budgets."""

import time
from dataclasses import dataclass, field

import numpy as np

from alpipe.errors import ConfigurationError, FitError

DEFAULT_TIME_CAP = 180.0

_KIND_DEFAULTS = {
    "knn": {"k": 5},
    "logreg": {"l2": 1e-4, "max_steps": 5000, "grad_tol": 1e-6},
    "gnb": {"var_floor": 1e-9},
    "random_forest": {"n_trees": 100},
    "extra_trees": {"n_trees": 100},
    "mlp": {"hidden": 64, "lr": 1e-2, "momentum": 0.9, "batch": 32, "epochs": 200},
    "external": {"command": None},
}

LEARNER_KINDS = tuple(_KIND_DEFAULTS)


@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    params: dict = field(default_factory=dict)
    fit_time_cap_seconds: float = DEFAULT_TIME_CAP

    def __post_init__(self):
        if self.kind not in _KIND_DEFAULTS:
            raise ConfigurationError(f"unknown learner kind {self.kind!r}")
        defaults = _KIND_DEFAULTS[self.kind]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigurationError(
                f"unknown {self.kind} hyperparameters: {sorted(unknown)}"
            )
        if self.kind == "external" and not self.params.get("command"):
            raise ConfigurationError("external learner requires a command")

    def resolved_params(self) -> dict:
        """Full hyperparameter map with defaults filled in (for RunRecords)."""
        out = dict(_KIND_DEFAULTS[self.kind])
        out.update(self.params)
        out["fit_time_cap_seconds"] = self.fit_time_cap_seconds
        return out


class TimeBudget:
    """Cooperative deadline checked at training-loop boundaries."""

    def __init__(self, seconds: float):
        self.seconds = seconds
        self.start = time.monotonic()

    def expired(self) -> bool:
        return time.monotonic() - self.start >= self.seconds

    def remaining(self) -> float:
        return max(0.0, self.seconds - (time.monotonic() - self.start))


class FittedModel:
    """Trained learner: class probabilities plus an optional embedding.

    Probability rows sum to 1 within 1e-9 and are entrywise nonnegative.
    embed defaults to passing the (already standardized) features through.
    """

    def __init__(self, spec: LearnerSpec, train_X, train_y, n_classes: int):
        self.spec = spec
        self.train_X = train_X
        self.train_y = train_y
        self.n_classes = n_classes

    def predict_proba(self, X) -> np.ndarray:
        raise NotImplementedError

    def embed(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64)


class ConstantModel(FittedModel):
    """Fallback for degenerate training sets: one Laplace-smoothed row."""

    def __init__(self, spec, train_X, train_y, n_classes):
        super().__init__(spec, train_X, train_y, n_classes)
        counts = np.bincount(train_y, minlength=n_classes).astype(np.float64)
        self.proba = (counts + 1.0) / (counts.sum() + n_classes)

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        return np.tile(self.proba, (X.shape[0], 1))


def check_fit_inputs(X, y, n_classes):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise FitError("need at least one training row")
    if not np.all(np.isfinite(X)):
        raise FitError("non-finite feature values")
    if y.shape != (X.shape[0],):
        raise FitError("labels must align with feature rows")
    if y.min() < 0 or y.max() >= n_classes:
        raise FitError("label outside {0..n_classes-1}")
    return X, y
