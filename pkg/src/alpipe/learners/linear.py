"""Multinomial softmax regression trained by full-batch gradient descent."""

import numpy as np

from alpipe.learners.base import FittedModel, TimeBudget


def _softmax(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def _loss_grad(W, b, X, Y, l2):
    """Mean cross-entropy + 0.5*l2*||W||^2 (bias unpenalized) and gradients."""
    n = X.shape[0]
    P = _softmax(X @ W + b)
    eps = 1e-300
    loss = -np.sum(Y * np.log(P + eps)) / n + 0.5 * l2 * np.sum(W * W)
    D = (P - Y) / n
    gW = X.T @ D + l2 * W
    gb = D.sum(axis=0)
    return loss, gW, gb, P


class LogRegModel(FittedModel):
    def __init__(self, spec, X, y, n_classes, W, b, loss_trace):
        super().__init__(spec, X, y, n_classes)
        self.W = W
        self.b = b
        self.loss_trace = loss_trace

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        return _softmax(X @ self.W + self.b)


def fit_logreg(spec, X, y, n_classes, rng):
    params = spec.resolved_params()
    l2 = params["l2"]
    d = X.shape[1]
    W = np.zeros((d, n_classes))
    b = np.zeros(n_classes)
    Y = np.zeros((X.shape[0], n_classes))
    Y[np.arange(X.shape[0]), y] = 1.0

    budget = TimeBudget(spec.fit_time_cap_seconds)
    trace = []
    loss, gW, gb, _ = _loss_grad(W, b, X, Y, l2)
    trace.append(loss)
    for _ in range(params["max_steps"]):
        if budget.expired():
            break
        gmax = max(np.abs(gW).max() if gW.size else 0.0, np.abs(gb).max())
        if gmax < params["grad_tol"]:
            break
        # backtracking line search, Armijo condition c1 = 1e-4
        g2 = np.sum(gW * gW) + np.sum(gb * gb)
        step = 1.0
        while step > 1e-14:
            newW = W - step * gW
            newb = b - step * gb
            new_loss, ngW, ngb, _ = _loss_grad(newW, newb, X, Y, l2)
            if new_loss <= loss - 1e-4 * step * g2:
                W, b, loss, gW, gb = newW, newb, new_loss, ngW, ngb
                trace.append(loss)
                break
            step *= 0.5
        else:
            break
    return LogRegModel(spec, X, y, n_classes, W, b, trace)
