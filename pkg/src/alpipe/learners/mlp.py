"""Single-hidden-layer ReLU network trained with momentum SGD.

Parameters are a dict {"W1", "b1", "W2", "b2"}. loss_and_grads is exposed
separately so the analytic gradients can be checked against finite
differences.
"""

import numpy as np

from alpipe.learners.base import FittedModel, TimeBudget


def init_params(d, hidden, n_classes, rng):
    return {
        "W1": rng.gaussian((d, hidden)) * np.sqrt(2.0 / d),
        "b1": np.zeros(hidden),
        "W2": rng.gaussian((hidden, n_classes)) * np.sqrt(2.0 / hidden),
        "b2": np.zeros(n_classes),
    }


def _forward(params, X):
    H = np.maximum(X @ params["W1"] + params["b1"], 0.0)
    Z = H @ params["W2"] + params["b2"]
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    P = E / E.sum(axis=1, keepdims=True)
    return H, P


def loss_and_grads(params, X, y, n_classes):
    """Mean cross-entropy loss and its analytic parameter gradients."""
    n = X.shape[0]
    H, P = _forward(params, X)
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    loss = -np.sum(Y * np.log(P + 1e-300)) / n
    dZ = (P - Y) / n
    gW2 = H.T @ dZ
    gb2 = dZ.sum(axis=0)
    dH = dZ @ params["W2"].T
    dH[H <= 0.0] = 0.0
    gW1 = X.T @ dH
    gb1 = dH.sum(axis=0)
    return loss, {"W1": gW1, "b1": gb1, "W2": gW2, "b2": gb2}


class MlpModel(FittedModel):
    def __init__(self, spec, X, y, n_classes, params):
        super().__init__(spec, X, y, n_classes)
        self.params = params

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        _, P = _forward(self.params, X)
        return P

    def embed(self, X):
        X = np.asarray(X, dtype=np.float64)
        H, _ = _forward(self.params, X)
        return H


def fit_mlp(spec, X, y, n_classes, rng):
    hp = spec.resolved_params()
    n = X.shape[0]
    params = init_params(X.shape[1], hp["hidden"], n_classes, rng)
    velocity = {k: np.zeros_like(v) for k, v in params.items()}
    budget = TimeBudget(spec.fit_time_cap_seconds)
    for _ in range(hp["epochs"]):
        if budget.expired():
            break
        order = rng.permutation(n)
        for start in range(0, n, hp["batch"]):
            batch = order[start : start + hp["batch"]]
            _, grads = loss_and_grads(params, X[batch], y[batch], n_classes)
            for k in params:
                velocity[k] = hp["momentum"] * velocity[k] - hp["lr"] * grads[k]
                params[k] = params[k] + velocity[k]
    return MlpModel(spec, X, y, n_classes, params)
