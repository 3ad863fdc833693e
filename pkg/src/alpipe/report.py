"""Report rendering: budget-curve/heatmap/win-matrix CSVs and SVGs.

Outputs are deterministic byte-for-byte given identical inputs: fixed
float formatting, sorted grouping keys, no timestamps, self-contained SVG.
"""

import re
from pathlib import Path

import numpy as np

from alpipe.errors import StoreError
from alpipe.evaluation import (
    BudgetCurve,
    ResultTable,
    aubc,
    heatmap,
    lose_heatmap,
    win_matrix,
)


def _fmt(x) -> str:
    return f"{float(x):.6g}"


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", str(name))


def record_curve(record, metric="accuracy") -> BudgetCurve:
    return BudgetCurve(
        points=tuple(
            (it["labeled_size"], it[metric]) for it in record.iterations
        )
    )


def record_metric(record, metric="aubc"):
    """Per-seed comparison statistic: cumulative AUBC or final accuracy."""
    if metric == "aubc":
        return aubc(record_curve(record))
    if metric == "final_accuracy":
        return record.iterations[-1]["accuracy"]
    raise ValueError(f"unknown comparison metric {metric!r}")


def build_result_table(records, metric="aubc") -> ResultTable:
    table = ResultTable()
    for rec in records:
        dataset = f"{rec.dataset_id}:{rec.setting_name}"
        table.add(rec.learner_kind, rec.strategy, dataset, record_metric(rec, metric))
    return table


def _filter_classes(records, classes):
    if classes == "binary":
        return [r for r in records if r.n_classes == 2]
    if classes == "multiclass":
        return [r for r in records if r.n_classes > 2]
    return list(records)


# ------------------------------------------------------------------- SVG

_SVG_HEADER = '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">'


def _heat_color(frac: float) -> str:
    # white -> steel blue ramp
    frac = min(max(frac, 0.0), 1.0)
    r = int(255 - 185 * frac)
    g = int(255 - 125 * frac)
    b = int(255 - 75 * frac)
    return f"rgb({r},{g},{b})"


def _matrix_svg(matrix, row_labels, col_labels, title, value_fmt=_fmt):
    cell, left, top = 56, 140, 60
    w = left + cell * len(col_labels) + 20
    h = top + cell * len(row_labels) + 20
    vmax = float(np.max(matrix)) if np.size(matrix) and np.max(matrix) > 0 else 1.0
    parts = [_SVG_HEADER.format(w=w, h=h)]
    parts.append(
        f'<text x="{left}" y="20" font-family="monospace" font-size="14">{title}</text>'
    )
    for j, label in enumerate(col_labels):
        x = left + j * cell + cell // 2
        parts.append(
            f'<text x="{x}" y="{top - 8}" font-family="monospace" font-size="10" '
            f'text-anchor="middle">{label[:9]}</text>'
        )
    for i, label in enumerate(row_labels):
        y = top + i * cell + cell // 2 + 4
        parts.append(
            f'<text x="{left - 6}" y="{y}" font-family="monospace" font-size="10" '
            f'text-anchor="end">{label[:16]}</text>'
        )
        for j in range(len(col_labels)):
            v = float(matrix[i][j])
            x = left + j * cell
            y0 = top + i * cell
            parts.append(
                f'<rect x="{x}" y="{y0}" width="{cell}" height="{cell}" '
                f'fill="{_heat_color(v / vmax)}" stroke="black" stroke-width="0.5"/>'
            )
            parts.append(
                f'<text x="{x + cell // 2}" y="{y0 + cell // 2 + 4}" '
                f'font-family="monospace" font-size="11" text-anchor="middle">'
                f"{value_fmt(v)}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _curves_svg(series, title):
    """series: sorted list of (label, [(x, y), ...])."""
    w, h, pad = 640, 400, 50
    xs = [x for _, pts in series for x, _ in pts]
    x_lo, x_hi = min(xs), max(xs)
    x_span = (x_hi - x_lo) or 1.0
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]

    def sx(x):
        return pad + (x - x_lo) / x_span * (w - 2 * pad)

    def sy(y):
        return h - pad - y * (h - 2 * pad)

    parts = [_SVG_HEADER.format(w=w, h=h)]
    parts.append(
        f'<text x="{pad}" y="20" font-family="monospace" font-size="14">{title}</text>'
    )
    parts.append(
        f'<rect x="{pad}" y="{pad}" width="{w - 2 * pad}" height="{h - 2 * pad}" '
        f'fill="none" stroke="black"/>'
    )
    for idx, (label, pts) in enumerate(series):
        color = palette[idx % len(palette)]
        path = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{w - pad + 2}" y="{pad + 14 * idx + 10}" font-family="monospace" '
            f'font-size="9" fill="{color}">{label[:10]}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ------------------------------------------------------------------ report

def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _budget_curve_rows(group):
    """Align seeds by iteration index (truncated to the shortest run)."""
    n_iter = min(len(rec.iterations) for rec in group)
    rows = []
    for t in range(n_iter):
        size = group[0].iterations[t]["labeled_size"]
        acc = [rec.iterations[t]["accuracy"] for rec in group]
        f1 = [rec.iterations[t]["macro_f1"] for rec in group]
        rows.append((t, size, acc, f1))
    return rows


def render_report(records, output_dir, metric="aubc", classes="all"):
    """Emit budget-curve, heatmap, lose-heatmap, and win-matrix artifacts."""
    records = _filter_classes(records, classes)
    if not records:
        raise StoreError("no run records to report on")
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise StoreError(f"cannot create output directory {out}: {exc}")
    written = []

    groups = {}
    for rec in sorted(
        records,
        key=lambda r: (r.dataset_id, r.setting_name, r.learner_kind, r.strategy,
                       r.split_seed, r.pipeline_seed),
    ):
        key = (rec.dataset_id, rec.setting_name, rec.learner_kind, rec.strategy)
        groups.setdefault(key, []).append(rec)

    for (dataset, setting, learner, strategy), group in groups.items():
        rows = _budget_curve_rows(group)
        multi = len(group) > 1
        if multi:
            header = ("iteration,labeled_size,mean_accuracy,std_accuracy,"
                      "mean_macro_f1,std_macro_f1")
        else:
            header = "iteration,labeled_size,accuracy,macro_f1"
        lines = [header]
        for t, size, acc, f1 in rows:
            if multi:
                lines.append(
                    f"{t},{size},{_fmt(np.mean(acc))},{_fmt(np.std(acc))},"
                    f"{_fmt(np.mean(f1))},{_fmt(np.std(f1))}"
                )
            else:
                lines.append(f"{t},{size},{_fmt(acc[0])},{_fmt(f1[0])}")
        stem = "_".join(_safe(p) for p in (dataset, setting, learner, strategy))
        path = out / f"curve_{stem}.csv"
        _write(path, "\n".join(lines) + "\n")
        written.append(path)

    # one SVG per (dataset, setting, learner): curves across strategies
    by_learner = {}
    for (dataset, setting, learner, strategy), group in groups.items():
        rows = _budget_curve_rows(group)
        pts = [(size, float(np.mean(acc))) for _, size, acc, _ in rows]
        by_learner.setdefault((dataset, setting, learner), []).append((strategy, pts))
    for (dataset, setting, learner), series in by_learner.items():
        series.sort()
        stem = "_".join(_safe(p) for p in (dataset, setting, learner))
        path = out / f"curves_{stem}.svg"
        _write(path, _curves_svg(series, f"budget curves {dataset} {learner}"))
        written.append(path)

    table = build_result_table(records, metric)

    def emit_matrix(name, matrix, rows, cols, title, fmt=_fmt):
        csv_lines = ["," + ",".join(cols)]
        for label, row in zip(rows, matrix):
            csv_lines.append(label + "," + ",".join(fmt(v) for v in row))
        _write(out / f"{name}.csv", "\n".join(csv_lines) + "\n")
        _write(out / f"{name}.svg", _matrix_svg(matrix, rows, cols, title, fmt))
        written.extend([out / f"{name}.csv", out / f"{name}.svg"])

    def count_fmt(v):
        return str(int(v))

    for sig, tag in ((True, "sig"), (False, "nosig")):
        H, lrns, strats, _ = heatmap(table, with_significance=sig)
        emit_matrix(f"heatmap_{tag}", H, lrns, strats, f"win heatmap ({tag})",
                    count_fmt)
        L, lrns, strats, _ = lose_heatmap(table, with_significance=sig)
        emit_matrix(f"lose_heatmap_{tag}", L, lrns, strats,
                    f"lose heatmap ({tag})", count_fmt)

    for learner in table.learners:
        W, strats, _ = win_matrix(table, learner)
        emit_matrix(
            f"win_matrix_{_safe(learner)}", W, strats, strats,
            f"win matrix {learner}",
        )

    return written
