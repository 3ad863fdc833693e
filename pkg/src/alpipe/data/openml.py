"""OpenML dataset client with a write-once local cache.

Cache layout: <cache_dir>/<id>/description (JSON) and <cache_dir>/<id>/data.arff.
Writes are temp-file + rename so concurrent fetchers of the same id are safe.
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path

from alpipe.errors import FetchError, IntegrityError
from alpipe.data.arff import parse_arff
from alpipe.data.tables import RawTable

API_URL = "https://www.openml.org/api/v1/json/data/{id}"


def _default_http_get(url: str) -> bytes:
    import requests

    resp = requests.get(url, timeout=60)
    resp.raise_for_status()
    return resp.content


def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fetch_openml(dataset_id: int, cache_dir, http_get=None) -> RawTable:
    """Fetch (or reuse from cache) one OpenML dataset as a RawTable.

    The dataset description names the ARFF payload URL, its md5 checksum,
    and the default target attribute. Cache hits never touch the network;
    a checksum mismatch on the cached payload raises IntegrityError.
    """
    if http_get is None:
        http_get = _default_http_get
    if int(dataset_id) <= 0:
        raise FetchError(f"invalid dataset id {dataset_id}")
    entry = Path(cache_dir) / str(int(dataset_id))
    desc_path = entry / "description"
    data_path = entry / "data.arff"

    if not desc_path.exists():
        try:
            payload = http_get(API_URL.format(id=int(dataset_id)))
        except Exception as exc:
            raise FetchError(f"dataset {dataset_id}: description fetch failed: {exc}")
        _atomic_write(desc_path, payload)
    try:
        desc = json.loads(desc_path.read_text())["data_set_description"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise FetchError(f"dataset {dataset_id}: malformed description: {exc}")

    if not data_path.exists():
        try:
            arff_bytes = http_get(desc["url"])
        except Exception as exc:
            raise FetchError(f"dataset {dataset_id}: payload fetch failed: {exc}")
        _atomic_write(data_path, arff_bytes)
    else:
        arff_bytes = data_path.read_bytes()

    expected = desc.get("md5_checksum")
    if expected:
        actual = hashlib.md5(arff_bytes).hexdigest()
        if actual != expected:
            raise IntegrityError(
                f"dataset {dataset_id}: cached payload checksum {actual} "
                f"does not match recorded {expected}"
            )

    table = parse_arff(arff_bytes.decode("utf-8"))
    target = desc.get("default_target_attribute")
    if target:
        names = [c.name for c in table.columns]
        if target in names:
            table.target_column = target
    return table
