"""Raw tabular data carrier shared by the ARFF/CSV parsers."""

from dataclasses import dataclass, field

import numpy as np

from alpipe.core import Dataset


@dataclass
class Column:
    """One table column; missing cells are None.

    kind is "numeric" (values are floats) or "nominal" (values are strings
    from the declared category list, in declaration order).
    """

    name: str
    kind: str
    values: list
    categories: tuple = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "nominal"):
            raise ValueError(f"bad column kind {self.kind!r}")


@dataclass
class RawTable:
    name: str
    columns: list
    target_column: str = ""

    def __post_init__(self):
        lengths = {len(c.values) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError("columns have unequal lengths")

    @property
    def n_rows(self):
        return len(self.columns[0].values) if self.columns else 0

    def column(self, name):
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def feature_columns(self):
        return [c for c in self.columns if c.name != self.target_column]

    def target_labels(self):
        """Integer class labels from the target column.

        Nominal targets map categories (declaration order, restricted to
        those that occur) to 0..C-1; numeric targets map sorted distinct
        values. Missing target cells are rejected.
        """
        col = self.column(self.target_column)
        if any(v is None for v in col.values):
            raise ValueError(f"target column {col.name!r} has missing values")
        if col.kind == "nominal":
            seen = set(col.values)
            classes = [c for c in col.categories if c in seen]
        else:
            classes = sorted(set(col.values))
        index = {c: i for i, c in enumerate(classes)}
        return np.array([index[v] for v in col.values], dtype=np.int64), len(classes)


def table_to_dataset(table: RawTable, model, source_id: str) -> Dataset:
    """Assemble a Dataset from a table and a fitted preprocessing model."""
    from alpipe.data.preprocess import apply_preprocess

    X = apply_preprocess(model, table, range(table.n_rows))
    y, n_classes = table.target_labels()
    return Dataset(
        features=X,
        labels=y,
        n_classes=n_classes,
        source_id=source_id,
        feature_names=tuple(model.feature_names),
    )
