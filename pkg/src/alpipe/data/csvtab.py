"""CSV parsing into RawTable with an explicit column-kind schema."""

import csv
import io

from alpipe.errors import ParseError
from alpipe.data.tables import Column, RawTable


def parse_csv(text: str, kinds, target_column: str | None = None) -> RawTable:
    """Parse header-first CSV; kinds declares "numeric"/"nominal" per column.

    Empty cells are missing. Nominal categories are collected in order of
    first appearance. Target defaults to the last column.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, expected a header row", 1)
    kinds = list(kinds)
    if len(kinds) != len(header):
        raise ParseError(
            f"schema declares {len(kinds)} columns, header has {len(header)}", 1
        )
    columns = [Column(name, kind, []) for name, kind in zip(header, kinds)]
    cat_order = [dict() for _ in columns]
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(columns):
            raise ParseError(
                f"row has {len(row)} values, expected {len(columns)}", lineno
            )
        for col, order, cell in zip(columns, cat_order, row):
            if cell == "":
                col.values.append(None)
            elif col.kind == "numeric":
                try:
                    col.values.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"non-numeric value {cell!r} in numeric column "
                        f"{col.name!r}",
                        lineno,
                    )
            else:
                order.setdefault(cell, len(order))
                col.values.append(cell)
    for col, order in zip(columns, cat_order):
        if col.kind == "nominal":
            col.categories = tuple(order)
    target = target_column if target_column is not None else header[-1]
    if target not in header:
        raise ParseError(f"target column {target!r} not in header", 1)
    return RawTable(name="csv", columns=columns, target_column=target)


def infer_kinds(text: str):
    """Guess numeric/nominal per column: numeric iff every non-empty cell parses."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    numeric = [True] * len(header)
    for row in reader:
        for i, cell in enumerate(row):
            if cell == "" or not numeric[i]:
                continue
            try:
                float(cell)
            except ValueError:
                numeric[i] = False
    return ["numeric" if flag else "nominal" for flag in numeric]
