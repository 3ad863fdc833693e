"""The ALP driver: alternate fitting and querying against the oracle."""

import time
from dataclasses import dataclass

import numpy as np

from alpipe import learners, qs
from alpipe.core import (
    Dataset,
    Oracle,
    PoolState,
    Scenario,
    SplitPlan,
    make_splits,
    scenario_setting,
)
from alpipe.errors import ConfigurationError, FitError
from alpipe.rng import derive_stream
from alpipe.store import RunRecord

ARTIFACT_VERSION = "alpipe-0.1.0"


@dataclass(frozen=True)
class AlpSpec:
    """One active-learning pipeline: a learner paired with a strategy."""

    learner: learners.LearnerSpec
    strategy: str
    constants: dict = None
    committee_size: int = 10

    def __post_init__(self):
        if self.strategy not in qs.STRATEGIES:
            raise ConfigurationError(f"unknown query strategy {self.strategy!r}")
        if self.committee_size < 2:
            raise ConfigurationError("committee_size must be >= 2")
        if self.constants is None:
            object.__setattr__(self, "constants", {})

    @property
    def needs_committee(self):
        return self.strategy in qs.COMMITTEE_STRATEGIES


def evaluate_model(model, test_X, test_y):
    """(accuracy, macro-F1); argmax ties to the lowest class, F1 0/0 := 0,
    classes absent from the test set are excluded from the macro mean."""
    P = model.predict_proba(test_X)
    pred = np.argmax(P, axis=1)
    test_y = np.asarray(test_y)
    accuracy = float(np.mean(pred == test_y))
    f1s = []
    for c in np.unique(test_y):
        tp = int(np.sum((pred == c) & (test_y == c)))
        fp = int(np.sum((pred == c) & (test_y != c)))
        fn = int(np.sum((pred != c) & (test_y == c)))
        denom = 2 * tp + fp + fn
        f1s.append(2.0 * tp / denom if denom else 0.0)
    return accuracy, float(np.mean(f1s))


def _build_context(model, alp, dataset, pool, batch, rng, committee_rng):
    X = dataset.features
    lab = np.array(pool.labeled, dtype=np.int64)
    unl = np.array(pool.unlabeled, dtype=np.int64)
    probs = model.predict_proba(X[unl])
    committee = None
    if alp.needs_committee:
        committee = learners.committee_proba(
            model, X[unl], alp.committee_size, committee_rng
        )
    return qs.QueryContext(
        labeled_X=X[lab],
        labeled_y=dataset.labels[lab],
        unlabeled_X=X[unl],
        batch_size=batch,
        rng=rng,
        probs=probs,
        embeddings_labeled=model.embed(X[lab]),
        embeddings_unlabeled=model.embed(X[unl]),
        committee=committee,
        constants=alp.constants,
    )


def run_alp(
    scenario: Scenario,
    alp: AlpSpec,
    dataset: Dataset,
    connector=None,
    split: SplitPlan | None = None,
) -> RunRecord:
    """Execute one ALP run and return (and optionally persist) its record."""
    setting = scenario_setting(scenario, dataset.n_classes)
    if split is None:
        split = make_splits(dataset, scenario)
    oracle = Oracle.for_split(dataset, split)
    initial = set(split.initial_labeled_indices)
    pool = PoolState(
        labeled=list(split.initial_labeled_indices),
        unlabeled=[i for i in split.train_indices if i not in initial],
    )
    X = dataset.features
    test_X = X[list(split.test_indices)]
    test_y = dataset.labels[list(split.test_indices)]

    record = RunRecord(
        dataset_id=dataset.source_id,
        setting_name=setting.name,
        setting={
            "initial_labeled": setting.initial_labeled,
            "total_budget": setting.total_budget,
            "batch_size": setting.batch_size,
            "max_iterations": setting.max_iterations,
            "test_fraction": setting.test_fraction,
        },
        split_seed=scenario.split_seed,
        pipeline_seed=scenario.pipeline_seed,
        n_classes=dataset.n_classes,
        learner_kind=alp.learner.kind,
        learner_params=alp.learner.resolved_params(),
        strategy=alp.strategy,
        strategy_constants=dict(alp.constants),
        committee_size=alp.committee_size,
        train_indices=list(split.train_indices),
        test_indices=list(split.test_indices),
        initial_labeled_indices=list(split.initial_labeled_indices),
        iterations=[],
        status="completed",
        artifact_version=ARTIFACT_VERSION,
    )

    def log_iteration(iteration, queried, fit_s, query_s, model):
        acc, f1 = evaluate_model(model, test_X, test_y)
        record.iterations.append(
            {
                "iteration": iteration,
                "labeled_size": len(pool.labeled),
                "queried": [int(i) for i in queried],
                "accuracy": acc,
                "macro_f1": f1,
                "fit_seconds": fit_s,
                "query_seconds": query_s,
            }
        )

    model = None
    try:
        t0 = time.monotonic()
        model = learners.fit(
            alp.learner,
            X[pool.labeled],
            dataset.labels[pool.labeled],
            dataset.n_classes,
            derive_stream(scenario.pipeline_seed, "fit", 0),
        )
        log_iteration(0, [], time.monotonic() - t0, 0.0, model)

        for t in range(1, setting.max_iterations + 1):
            remaining_budget = setting.total_budget - pool.spent_budget
            batch = min(setting.batch_size, len(pool.unlabeled), remaining_budget)
            if batch <= 0:
                break
            q0 = time.monotonic()
            ctx = _build_context(
                model,
                alp,
                dataset,
                pool,
                batch,
                derive_stream(scenario.pipeline_seed, "qs", t),
                derive_stream(scenario.pipeline_seed, "committee", t),
            )
            positions = qs.dispatch(alp.strategy, ctx)
            queried = [pool.unlabeled[p] for p in positions]
            query_s = time.monotonic() - q0
            for idx in queried:
                oracle.query(idx, iteration=t)
            pool.acquire(queried)
            f0 = time.monotonic()
            model = learners.fit(
                alp.learner,
                X[pool.labeled],
                dataset.labels[pool.labeled],
                dataset.n_classes,
                derive_stream(scenario.pipeline_seed, "fit", t),
            )
            log_iteration(t, queried, time.monotonic() - f0, query_s, model)
    except FitError as exc:
        record.status = "failed"
        record.failure_reason = str(exc)
    finally:
        closer = getattr(model, "close", None)
        if closer:
            closer()

    if connector is not None:
        connector.save(record)
    return record


def run_alp_from_table(table, scenario, alp, connector=None, source_id=None):
    """Split first, fit preprocessing on the train split only, then run."""
    from alpipe.core import resolve_setting
    from alpipe.data import fit_preprocess, table_to_dataset

    y, n_classes = table.target_labels()
    probe = Dataset(
        features=np.zeros((len(y), 1)),
        labels=y,
        n_classes=n_classes,
        source_id=source_id or table.name,
        feature_names=("probe",),
    )
    split = make_splits(probe, scenario)
    model = fit_preprocess(table, split.train_indices)
    dataset = table_to_dataset(table, model, source_id or table.name)
    return run_alp(scenario, alp, dataset, connector=connector, split=split)
