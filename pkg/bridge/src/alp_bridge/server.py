"""The adapter's request loop: read a line, answer a line, repeat.

Malformed input (bad JSON, unknown kind, missing fields, estimator
exceptions) produces an error response and the loop continues; only
shutdown or end-of-input stops it. Probabilities are expanded to the full
class count declared at fit time, so the client always sees row-stochastic
(n, n_classes) matrices even when the labeled data covers fewer classes.
"""

import json
import sys

import numpy as np

from alp_bridge.protocol import PROTOCOL_VERSION, error, validate_request
from alp_bridge.registry import ESTIMATORS, mlp_embedding, subsample_rows


class AdapterState:
    def __init__(self, estimator_name: str):
        if estimator_name not in ESTIMATORS:
            raise ValueError(f"unknown estimator {estimator_name!r}")
        self.name = estimator_name
        self.entry = ESTIMATORS[estimator_name]
        self.estimator = None
        self.n_classes = None

    def capabilities(self):
        caps = ["proba"]
        if self.entry.has_embed:
            caps.append("embed")
        return caps

    def handle_hello(self, message):
        if message["version"] != PROTOCOL_VERSION:
            return error(
                f"unsupported protocol version {message['version']!r}; "
                f"this adapter speaks {PROTOCOL_VERSION}"
            )
        return {
            "ok": True,
            "version": PROTOCOL_VERSION,
            "capabilities": self.capabilities(),
            "estimator": self.name,
        }

    def handle_fit(self, message):
        X = np.asarray(message["X"], dtype=np.float64)
        y = np.asarray(message["y"], dtype=np.int64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            return error("fit payload shapes do not align")
        n_classes = int(message["n_classes"])
        if y.size and (y.min() < 0 or y.max() >= n_classes):
            return error("labels outside {0..n_classes-1}")
        seed = int(message["seed"])
        rows = np.arange(X.shape[0])
        if self.entry.row_cap is not None:
            rows = subsample_rows(X.shape[0], self.entry.row_cap, seed)
        estimator = self.entry.factory(seed)
        try:
            estimator.fit(X[rows], y[rows])
        except Exception as exc:
            return error(f"estimator fit failed: {exc}")
        self.estimator = estimator
        self.n_classes = n_classes
        return {"ok": True, "n_train_rows": int(rows.size)}

    def _full_proba(self, X):
        P = self.estimator.predict_proba(X)
        full = np.zeros((X.shape[0], self.n_classes), dtype=np.float64)
        for col, cls in enumerate(self.estimator.classes_):
            full[:, int(cls)] = P[:, col]
        # guard against all-zero rows from degenerate estimators
        sums = full.sum(axis=1, keepdims=True)
        bad = sums[:, 0] <= 0.0
        full[bad] = 1.0 / self.n_classes
        sums[bad] = 1.0
        return full / sums

    def handle_predict_proba(self, message):
        if self.estimator is None:
            return error("predict_proba before fit")
        X = np.asarray(message["X"], dtype=np.float64)
        if X.ndim != 2:
            return error("X must be a matrix")
        try:
            P = self._full_proba(X)
        except Exception as exc:
            return error(f"prediction failed: {exc}")
        return {"ok": True, "proba": P.tolist()}

    def handle_embed(self, message):
        if not self.entry.has_embed:
            return error(f"estimator {self.name!r} offers no embedding")
        if self.estimator is None:
            return error("embed before fit")
        X = np.asarray(message["X"], dtype=np.float64)
        try:
            E = mlp_embedding(self.estimator, X)
        except Exception as exc:
            return error(f"embedding failed: {exc}")
        return {"ok": True, "embedding": E.tolist()}

    def handle(self, message):
        """Response for one decoded request; None means stop serving."""
        problem = validate_request(message)
        if problem:
            return error(problem)
        kind = message["kind"]
        if kind == "shutdown":
            return None
        return getattr(self, f"handle_{kind}")(message)


def serve(estimator_name: str, stdin=None, stdout=None) -> int:
    """Run the request loop until shutdown or end-of-input."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    state = AdapterState(estimator_name)
    for line in stdin:
        if not line.strip():
            continue
        try:
            message = json.loads(line)
        except json.JSONDecodeError as exc:
            response = error(f"request is not valid JSON: {exc}")
        else:
            response = state.handle(message)
        if response is None:
            stdout.write(json.dumps({"ok": True}) + "\n")
            stdout.flush()
            return 0
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
    return 0
