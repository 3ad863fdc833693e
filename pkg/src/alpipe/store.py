"""File-backed Benchmark Connector and grid experimenter.

Run records are human-readable JSON documents with an explicit schema
version, written atomically (temp file + rename). Grid workers claim cells
by atomically creating claim-marker files, so concurrent workers never
duplicate work.
"""

import itertools
import json
import os
import tempfile
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

from alpipe.errors import StoreConflictError, StoreError

SCHEMA_VERSION = 1

# wall-clock fields excluded from the idempotence/replay comparison
_VOLATILE_ITERATION_FIELDS = ("fit_seconds", "query_seconds")


@dataclass
class RunRecord:
    """Full reproducibility log of one ALP run."""

    dataset_id: str
    setting_name: str
    setting: dict
    split_seed: int
    pipeline_seed: int
    n_classes: int
    learner_kind: str
    learner_params: dict
    strategy: str
    strategy_constants: dict
    committee_size: int
    train_indices: list
    test_indices: list
    initial_labeled_indices: list
    iterations: list
    status: str = "completed"
    artifact_version: str = ""
    failure_reason: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = json.loads(text)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise StoreError(
                f"unsupported record schema version {data.get('schema_version')}"
            )
        return cls(**data)

    def replay_key(self) -> str:
        """Canonical serialization with wall times stripped."""
        data = asdict(self)
        for it in data["iterations"]:
            for k in _VOLATILE_ITERATION_FIELDS:
                it.pop(k, None)
        return json.dumps(data, sort_keys=True)

    def store_key(self):
        return (
            str(self.dataset_id),
            self.setting_name,
            self.learner_kind,
            self.strategy,
            f"{self.split_seed}-{self.pipeline_seed}",
        )


def _record_path(root, key) -> Path:
    dataset, setting, learner, strategy, seed = key
    return Path(root) / dataset / setting / learner / strategy / f"{seed}.run"


def _atomic_write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_run(record: RunRecord, root) -> Path:
    """Persist one record; idempotent for identical records, conflict otherwise."""
    path = _record_path(root, record.store_key())
    if path.exists():
        existing = RunRecord.from_json(path.read_text())
        if existing.replay_key() == record.replay_key():
            return path
        raise StoreConflictError(f"differing record already stored at {path}")
    _atomic_write_text(path, record.to_json())
    return path


def load_runs(root, dataset=None, setting=None, learner=None, strategy=None):
    """All matching records in deterministic path order plus an error report."""
    root = Path(root)
    if not root.exists():
        raise StoreError(f"store root {root} does not exist")
    records, errors = [], []
    for path in sorted(root.rglob("*.run")):
        rel = path.relative_to(root).parts
        if len(rel) != 5:
            continue
        d, s, l, q, _ = rel
        if dataset is not None and d != str(dataset):
            continue
        if setting is not None and s != setting:
            continue
        if learner is not None and l != learner:
            continue
        if strategy is not None and q != strategy:
            continue
        try:
            records.append(RunRecord.from_json(path.read_text()))
        except Exception as exc:
            errors.append((str(path), str(exc)))
    return records, errors


class FileConnector:
    """Connector facade used by the pipeline to persist records."""

    def __init__(self, root):
        self.root = Path(root)

    def save(self, record: RunRecord) -> Path:
        return save_run(record, self.root)

    def load(self, **filters):
        return load_runs(self.root, **filters)


@dataclass(frozen=True)
class GridSpec:
    """Cross-product experiment grid."""

    datasets: tuple
    settings: tuple
    learners: tuple  # LearnerSpec instances
    strategies: tuple
    seeds: tuple

    def cells(self):
        return itertools.product(
            self.datasets, self.settings, self.learners, self.strategies, self.seeds
        )


@dataclass
class GridCell:
    dataset: str
    setting: str
    learner: object
    strategy: str
    seed: int
    claim_path: Path = field(default=None)

    def key(self):
        return (
            str(self.dataset),
            self.setting,
            self.learner.kind,
            self.strategy,
            f"{self.seed}-{self.seed}",
        )

    def release(self):
        if self.claim_path is not None and self.claim_path.exists():
            self.claim_path.unlink()


def _try_claim(path: Path, lease_seconds: float) -> bool:
    path.parent.mkdir(parents=True, exist_ok=True)
    for _ in range(2):
        try:
            fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            os.write(fd, f"{os.getpid()} {time.time()}\n".encode())
            os.close(fd)
            return True
        except FileExistsError:
            try:
                age = time.time() - path.stat().st_mtime
            except FileNotFoundError:
                continue  # holder just released; retry the exclusive create
            if age <= lease_seconds:
                return False
            try:
                path.unlink()  # stale claim: remove and retry
            except FileNotFoundError:
                pass
    return False


def expand_and_claim(grid: GridSpec, root, lease_seconds: float = 3600.0):
    """Claim the first grid cell with neither a run file nor a live claim."""
    root = Path(root)
    for dataset, setting, learner, strategy, seed in grid.cells():
        cell = GridCell(dataset, setting, learner, strategy, seed)
        run_path = _record_path(root, cell.key())
        if run_path.exists():
            continue
        claim_path = run_path.with_suffix(".claim")
        if _try_claim(claim_path, lease_seconds):
            cell.claim_path = claim_path
            return cell
    return None
