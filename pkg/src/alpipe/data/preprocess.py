"""Imputation, one-hot encoding, and standardization fitted on chosen rows."""

from dataclasses import dataclass

import numpy as np

from alpipe.errors import PreprocessingError
from alpipe.data.tables import RawTable


@dataclass(frozen=True)
class NumericStats:
    name: str
    impute_mean: float
    mean: float
    stddev: float


@dataclass(frozen=True)
class NominalStats:
    name: str
    impute_mode: str
    # Categories observed on the fit rows, in declaration order; one output
    # column each. Unobserved categories encode as an all-zero block.
    block: tuple


@dataclass(frozen=True)
class PreprocessModel:
    stats: tuple
    fitted_on: tuple
    feature_names: tuple
    schema: tuple  # (name, kind) per feature column


def fit_preprocess(table: RawTable, fit_indices) -> PreprocessModel:
    """Fit imputation / one-hot / z-score statistics on the given rows only.

    Numeric columns: mean imputation plus z-score statistics over the
    non-missing fitted cells. Nominal columns: mode imputation (ties by
    declaration order) and a one-hot block over fit-observed categories.
    """
    fit_indices = [int(i) for i in fit_indices]
    if not fit_indices:
        raise PreprocessingError("fit_indices must be nonempty")
    stats = []
    names = []
    for col in table.feature_columns:
        cells = [col.values[i] for i in fit_indices]
        present = [v for v in cells if v is not None]
        if not present:
            raise PreprocessingError(
                f"column {col.name!r} entirely missing on the fit rows"
            )
        if col.kind == "numeric":
            impute = float(np.mean(present))
            full = [v if v is not None else impute for v in cells]
            mean = float(np.mean(full))
            std = float(np.std(full))
            stats.append(NumericStats(col.name, impute, mean, std))
            names.append(col.name)
        else:
            counts = {c: 0 for c in col.categories}
            for v in present:
                counts[v] += 1
            mode = max(col.categories, key=lambda c: (counts[c], -col.categories.index(c)))
            block = tuple(c for c in col.categories if counts[c] > 0)
            stats.append(NominalStats(col.name, mode, block))
            names.extend(f"{col.name}={c}" for c in block)
    return PreprocessModel(
        stats=tuple(stats),
        fitted_on=tuple(fit_indices),
        feature_names=tuple(names),
        schema=tuple((c.name, c.kind) for c in table.feature_columns),
    )


def apply_preprocess(model: PreprocessModel, table: RawTable, indices) -> np.ndarray:
    """Impute, one-hot expand, then z-score numeric columns.

    Zero-stddev numeric columns are emitted as all zeros; nominal values
    unseen at fit time yield an all-zero block.
    """
    schema = tuple((c.name, c.kind) for c in table.feature_columns)
    if schema != model.schema:
        raise PreprocessingError("table schema does not match the fitted model")
    indices = [int(i) for i in indices]
    blocks = []
    for col, st in zip(table.feature_columns, model.stats):
        cells = [col.values[i] for i in indices]
        if col.kind == "numeric":
            vals = np.array(
                [v if v is not None else st.impute_mean for v in cells],
                dtype=np.float64,
            )
            if st.stddev == 0.0:
                vals = np.zeros_like(vals)
            else:
                vals = (vals - st.mean) / st.stddev
            blocks.append(vals[:, None])
        else:
            pos = {c: j for j, c in enumerate(st.block)}
            out = np.zeros((len(cells), len(st.block)), dtype=np.float64)
            for r, v in enumerate(cells):
                if v is None:
                    v = st.impute_mode
                j = pos.get(v)
                if j is not None:
                    out[r, j] = 1.0
            blocks.append(out)
    if not blocks:
        raise PreprocessingError("table has no feature columns")
    return np.hstack(blocks)
