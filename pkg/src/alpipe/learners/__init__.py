"""Learner dispatch: fit / embed / committee under one contract."""

import logging

import numpy as np

from alpipe.learners.base import (
    ConstantModel,
    FittedModel,
    LearnerSpec,
    LEARNER_KINDS,
    check_fit_inputs,
)
from alpipe.learners.bayes import fit_gnb
from alpipe.learners.external import fit_external
from alpipe.learners.forest import ForestModel, fit_extra_trees, fit_random_forest
from alpipe.learners.knn import fit_knn
from alpipe.learners.linear import fit_logreg
from alpipe.learners.mlp import fit_mlp

log = logging.getLogger(__name__)

_FITTERS = {
    "knn": fit_knn,
    "logreg": fit_logreg,
    "gnb": fit_gnb,
    "random_forest": fit_random_forest,
    "extra_trees": fit_extra_trees,
    "mlp": fit_mlp,
    "external": fit_external,
}

COMMITTEE_CAPABLE = tuple(LEARNER_KINDS)


def fit(spec: LearnerSpec, X, y, n_classes: int, rng) -> FittedModel:
    """Train one learner; class count comes from the dataset, never the batch."""
    X, y = check_fit_inputs(X, y, n_classes)
    if len(np.unique(y)) < 2:
        return ConstantModel(spec, X, y, n_classes)
    return _FITTERS[spec.kind](spec, X, y, n_classes, rng)


def embed(model: FittedModel, X) -> np.ndarray:
    return model.embed(X)


def committee_proba(model: FittedModel, X, M: int, rng) -> list:
    """M ensemble-member probability matrices.

    Forest models partition their trees into M groups; everything else is
    refit on M bootstrap replicas under a pro-rated time cap.
    """
    X = np.asarray(X, dtype=np.float64)
    if isinstance(model, ForestModel):
        return model.group_proba(X, M)
    n = model.train_X.shape[0]
    if n < 2:
        log.warning("training set smaller than 2: degenerate single-member committee")
        return [model.predict_proba(X)]
    spec = model.spec
    sub_spec = LearnerSpec(
        kind=spec.kind,
        params=spec.params,
        fit_time_cap_seconds=spec.fit_time_cap_seconds / M,
    )
    members = []
    for _ in range(M):
        boot = rng.integers(0, n, size=n)
        replica = fit(sub_spec, model.train_X[boot], model.train_y[boot],
                      model.n_classes, rng)
        members.append(replica.predict_proba(X))
        closer = getattr(replica, "close", None)
        if closer:
            closer()
    return members


__all__ = [
    "LearnerSpec",
    "FittedModel",
    "ConstantModel",
    "LEARNER_KINDS",
    "fit",
    "embed",
    "committee_proba",
]
