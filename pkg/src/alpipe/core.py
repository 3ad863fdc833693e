"""Core domain types: datasets, settings, scenarios, splits, pools, oracle."""

import math
from dataclasses import dataclass, field

import numpy as np

from alpipe.errors import (
    ConfigurationError,
    ProtocolViolationError,
    UnsatisfiableSplitError,
)
from alpipe.rng import derive_stream


@dataclass(frozen=True)
class Dataset:
    """Preprocessed feature matrix with hidden labels.

    features: (n, d) float matrix, rows are instances.
    labels: integer class per row in {0..n_classes-1}.
    """

    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    source_id: str
    feature_names: tuple

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 1:
            raise ValueError("feature matrix must be at least 2x1")
        if not np.all(np.isfinite(X)):
            raise ValueError("feature matrix contains non-finite values")
        if y.shape != (X.shape[0],):
            raise ValueError("labels must align with feature rows")
        if self.n_classes < 2:
            raise ValueError("need at least 2 classes")
        if y.min() < 0 or y.max() >= self.n_classes:
            raise ValueError("label outside {0..n_classes-1}")
        present = np.unique(y)
        if len(present) != self.n_classes:
            raise ValueError("every class index must occur at least once")

    @property
    def n_rows(self):
        return self.features.shape[0]


@dataclass(frozen=True)
class ResolvedSetting:
    """Concrete active-learning problem parameters."""

    name: str
    initial_labeled: int
    total_budget: int
    batch_size: int
    max_iterations: int
    test_fraction: float = 1.0 / 3.0

    def __post_init__(self):
        if self.initial_labeled < 1:
            raise ValueError("initial_labeled must be >= 1")
        if self.batch_size > self.total_budget:
            raise ValueError("batch_size must not exceed total_budget")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError("test_fraction must be in (0,1)")


@dataclass(frozen=True)
class Scenario:
    """Binds a dataset and a setting to split and pipeline seeds."""

    dataset_ref: str
    setting: str | ResolvedSetting
    split_seed: int
    pipeline_seed: int


@dataclass(frozen=True)
class SplitPlan:
    train_indices: tuple
    test_indices: tuple
    initial_labeled_indices: tuple

    def __post_init__(self):
        train = set(self.train_indices)
        test = set(self.test_indices)
        if train & test:
            raise ValueError("train and test overlap")
        if not set(self.initial_labeled_indices) <= train:
            raise ValueError("initial labeled pool must lie in the train split")


@dataclass
class PoolState:
    """Mutable labeled/unlabeled partition of the train split."""

    labeled: list
    unlabeled: list
    spent_budget: int = 0

    def acquire(self, indices):
        unl = set(indices)
        self.unlabeled = [i for i in self.unlabeled if i not in unl]
        self.labeled.extend(indices)
        self.spent_budget += len(indices)


@dataclass
class Oracle:
    """Simulated labeling authority over the hidden ground truth.

    Answers only for train-split indices not yet labeled; every
    consultation is appended to the log as (iteration, index, label).
    """

    hidden_labels: dict
    queryable: set
    log: list = field(default_factory=list)

    @classmethod
    def for_split(cls, dataset: Dataset, split: SplitPlan):
        labels = {int(i): int(dataset.labels[i]) for i in split.train_indices}
        queryable = set(split.train_indices) - set(split.initial_labeled_indices)
        return cls(hidden_labels=labels, queryable=queryable)

    def query(self, index: int, iteration: int = 0) -> int:
        if index not in self.queryable:
            raise ProtocolViolationError(
                f"index {index} is not an unlabeled train instance"
            )
        self.queryable.discard(index)
        label = self.hidden_labels[index]
        self.log.append((iteration, int(index), label))
        return label


def oracle_label(oracle: Oracle, index: int, iteration: int = 0) -> int:
    return oracle.query(index, iteration)


# Static rows of the predefined-settings table, (initial, budget, batch).
_STATIC_SETTINGS = {
    "small": (30, 200, 10),
    "medium": (100, 1000, 50),
    "large": (300, 10000, 200),
}

# Dynamic rows: per-class multipliers (initial, budget, batch). The *-init
# variants reproduce the prose formulation where the initial pool also
# scales with the class count.
_DYNAMIC_SETTINGS = {
    "small-dynamic": (None, 100, 5),
    "large-dynamic": (None, 400, 20),
    "small-dynamic-init": (5, 100, 5),
    "large-dynamic-init": (20, 400, 20),
}

SETTING_TEMPLATES = tuple(_STATIC_SETTINGS) + tuple(_DYNAMIC_SETTINGS)


def resolve_setting(template_name: str, n_classes: int) -> ResolvedSetting:
    """Resolve a named setting template against the dataset's class count."""
    if n_classes < 2:
        raise ConfigurationError("n_classes must be >= 2")
    if template_name in _STATIC_SETTINGS:
        initial, budget, batch = _STATIC_SETTINGS[template_name]
        return ResolvedSetting(
            name=template_name,
            initial_labeled=initial,
            total_budget=budget,
            batch_size=batch,
            max_iterations=math.ceil(budget / batch),
        )
    if template_name in _DYNAMIC_SETTINGS:
        init_mult, budget_mult, batch_mult = _DYNAMIC_SETTINGS[template_name]
        initial = 10 if init_mult is None else init_mult * n_classes
        return ResolvedSetting(
            name=template_name,
            initial_labeled=initial,
            total_budget=budget_mult * n_classes,
            batch_size=batch_mult * n_classes,
            max_iterations=20,
        )
    raise ConfigurationError(f"unknown setting template {template_name!r}")


def scenario_setting(scenario: Scenario, n_classes: int) -> ResolvedSetting:
    if isinstance(scenario.setting, ResolvedSetting):
        return scenario.setting
    return resolve_setting(scenario.setting, n_classes)


def make_splits(dataset: Dataset, scenario: Scenario) -> SplitPlan:
    """Draw the test / train / initial-labeled split for a scenario.

    Test set: uniform random floor(n * test_fraction) rows. Initial pool:
    uniform random subset of the train split, then one random instance per
    train class missing from it is appended (the pool may exceed its
    nominal size). Pure function of (dataset rows, split_seed, setting).
    """
    setting = scenario_setting(scenario, dataset.n_classes)
    n = dataset.n_rows
    # +eps so an exact 1/3 fraction floors to n//3 despite float rounding
    n_test = math.floor(n * setting.test_fraction + 1e-9)
    stream = derive_stream(scenario.split_seed, "split", 0)
    perm = stream.permutation(n)
    test = np.sort(perm[:n_test])
    train = np.sort(perm[n_test:])
    if len(train) <= setting.initial_labeled:
        raise UnsatisfiableSplitError(
            f"train split of {len(train)} rows cannot hold an initial pool "
            f"of {setting.initial_labeled}"
        )
    train_classes = set(np.unique(dataset.labels[train]).tolist())
    if len(train_classes) != dataset.n_classes:
        missing = sorted(set(range(dataset.n_classes)) - train_classes)
        raise UnsatisfiableSplitError(
            f"classes {missing} have no instance in the train split"
        )

    picked = stream.choice(len(train), size=setting.initial_labeled, replace=False)
    initial = [int(train[i]) for i in np.sort(picked)]
    covered = set(int(dataset.labels[i]) for i in initial)
    unlabeled = [int(i) for i in train if int(i) not in set(initial)]
    for cls in sorted(train_classes - covered):
        candidates = [i for i in unlabeled if int(dataset.labels[i]) == cls]
        extra = candidates[int(stream.integers(0, len(candidates)))]
        initial.append(extra)
        unlabeled.remove(extra)

    return SplitPlan(
        train_indices=tuple(int(i) for i in train),
        test_indices=tuple(int(i) for i in test),
        initial_labeled_indices=tuple(initial),
    )
