"""Client side of the external-learner bridge.

Spawns an adapter child process and speaks the "alp-bridge/1" protocol:
one JSON object per line over stdin/stdout, strict request/response
alternation (hello, fit, predict_proba, embed, shutdown). The engine owns
the fit time cap and kills the child on overrun.
"""

import json
import shlex
import subprocess
import threading

import numpy as np

from alpipe.errors import BridgeError
from alpipe.learners.base import FittedModel

PROTOCOL_VERSION = "alp-bridge/1"
DEFAULT_TIMEOUT = 60.0


class BridgeClient:
    def __init__(self, command):
        if isinstance(command, str):
            command = shlex.split(command)
        self.command = list(command)
        try:
            self.child = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
            )
        except OSError as exc:
            raise BridgeError(f"cannot spawn adapter {self.command}: {exc}")
        self.capabilities = self._hello()

    def _read_line(self, timeout):
        box = {}

        def reader():
            box["line"] = self.child.stdout.readline()

        t = threading.Thread(target=reader, daemon=True)
        t.start()
        t.join(timeout)
        if t.is_alive():
            self.close(kill=True)
            raise BridgeError(
                f"adapter exceeded its {timeout:.1f}s deadline and was terminated"
            )
        return box.get("line", "")

    def request(self, message, timeout=DEFAULT_TIMEOUT):
        if self.child.poll() is not None:
            raise BridgeError("adapter child has exited")
        try:
            self.child.stdin.write(json.dumps(message) + "\n")
            self.child.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeError(f"adapter pipe broken: {exc}")
        line = self._read_line(timeout)
        if not line:
            raise BridgeError("adapter closed its stdout mid-conversation")
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BridgeError(f"adapter sent non-JSON response: {exc}")
        return response

    def _hello(self):
        resp = self.request({"kind": "hello", "version": PROTOCOL_VERSION})
        if not resp.get("ok") or resp.get("version") != PROTOCOL_VERSION:
            self.close(kill=True)
            raise BridgeError(f"protocol handshake failed: {resp}")
        caps = resp.get("capabilities", [])
        if "proba" not in caps:
            self.close(kill=True)
            raise BridgeError("adapter does not offer probability prediction")
        return caps

    def close(self, kill=False):
        if self.child.poll() is None:
            if not kill:
                try:
                    self.child.stdin.write(json.dumps({"kind": "shutdown"}) + "\n")
                    self.child.stdin.flush()
                    self.child.wait(timeout=5)
                except Exception:
                    kill = True
            if kill:
                self.child.kill()
                self.child.wait()


class ExternalModel(FittedModel):
    """Facade over one fitted adapter child."""

    def __init__(self, spec, X, y, n_classes, client):
        super().__init__(spec, X, y, n_classes)
        self.client = client

    def _validated_proba(self, payload, n_rows):
        P = np.asarray(payload, dtype=np.float64)
        if P.shape != (n_rows, self.n_classes):
            raise BridgeError(f"bad probability shape {P.shape}")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-6):
            raise BridgeError("adapter emitted a non-row-stochastic matrix")
        return P / P.sum(axis=1, keepdims=True)

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        resp = self.client.request(
            {"kind": "predict_proba", "X": X.tolist()}
        )
        if not resp.get("ok"):
            raise BridgeError(f"predict_proba failed: {resp.get('error')}")
        return self._validated_proba(resp.get("proba"), X.shape[0])

    def embed(self, X):
        X = np.asarray(X, dtype=np.float64)
        if "embed" not in self.client.capabilities:
            return X
        resp = self.client.request({"kind": "embed", "X": X.tolist()})
        if not resp.get("ok"):
            return X
        E = np.asarray(resp.get("embedding"), dtype=np.float64)
        if E.shape[0] != X.shape[0]:
            raise BridgeError("embedding row count does not match input")
        return E

    def close(self):
        self.client.close()


def fit_external(spec, X, y, n_classes, rng):
    client = BridgeClient(spec.resolved_params()["command"])
    seed = int(rng.integers(0, 2**31))
    cap = spec.fit_time_cap_seconds
    try:
        resp = client.request(
            {
                "kind": "fit",
                "X": np.asarray(X).tolist(),
                "y": np.asarray(y).tolist(),
                "n_classes": int(n_classes),
                "seed": seed,
                "time_cap": cap,
            },
            timeout=cap,
        )
    except BridgeError:
        raise
    if not resp.get("ok"):
        client.close(kill=True)
        raise BridgeError(f"fit failed: {resp.get('error')}")
    return ExternalModel(spec, X, y, n_classes, client)
