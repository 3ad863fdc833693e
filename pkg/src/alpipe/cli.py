"""Command-line entry points: fetch, run, grid, report, selftest."""

import argparse
import json
import math
import os
import sys
import threading
from pathlib import Path

import numpy as np

from alpipe import __version__
from alpipe.configfile import parse_grid_file, parse_learner_token, parse_scenario_file
from alpipe.core import Scenario
from alpipe.data import (
    fetch_openml,
    fit_preprocess,
    infer_kinds,
    parse_arff,
    parse_csv,
)
from alpipe.errors import AlpipeError
from alpipe.pipeline import AlpSpec, run_alp_from_table
from alpipe.report import record_curve, render_report
from alpipe.evaluation import aubc
from alpipe.store import FileConnector, GridSpec, expand_and_claim, load_runs

DEFAULT_CACHE = "~/.cache/alpipe"


def _cache_dir(flag_value):
    if flag_value:
        return Path(flag_value).expanduser()
    return Path(os.environ.get("ALPIPE_CACHE", DEFAULT_CACHE)).expanduser()


def _dataset_id(token):
    """The store identifier for a dataset reference: the OpenML id itself,
    or the stem of a local file path."""
    if str(token).isdigit():
        return str(token)
    return Path(token).stem


def _load_table(token, cache_dir):
    """Dataset reference: an OpenML id, an .arff path, or a .csv path."""
    if str(token).isdigit():
        return fetch_openml(int(token), cache_dir), str(token)
    path = Path(token)
    text = path.read_text()
    if path.suffix.lower() == ".arff":
        return parse_arff(text), path.stem
    if path.suffix.lower() == ".csv":
        return parse_csv(text, infer_kinds(text)), path.stem
    raise AlpipeError(f"cannot interpret dataset reference {token!r}")


def _echo_config(args):
    shown = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print(f"alpipe {__version__} | config: {json.dumps(shown, default=str)}")


def cmd_fetch(args):
    if not args.ids:
        print("fetch: no dataset ids given", file=sys.stderr)
        return 2
    cache = _cache_dir(args.cache)
    failures = 0
    for token in args.ids:
        try:
            table, _ = _load_table(token, cache)
            y, n_classes = table.target_labels()
            print(
                f"{token}: {table.n_rows} rows, "
                f"{len(table.feature_columns)} feature columns, "
                f"{n_classes} classes"
            )
        except Exception as exc:
            failures += 1
            print(f"{token}: FAILED ({exc})", file=sys.stderr)
    return 1 if failures else 0


def _scenario_from_args(args):
    if args.config:
        return parse_scenario_file(Path(args.config).read_text())
    return Scenario(
        dataset_ref=str(args.dataset),
        setting=args.setting,
        split_seed=args.split_seed,
        pipeline_seed=args.pipeline_seed,
    )


def cmd_run(args):
    try:
        scenario = _scenario_from_args(args)
        alp = AlpSpec(
            learner=parse_learner_token(args.learner, args.time_cap),
            strategy=args.qs,
        )
    except AlpipeError as exc:
        print(f"run: {exc}", file=sys.stderr)
        return 2
    cache = _cache_dir(args.cache)
    table, source_id = _load_table(scenario.dataset_ref, cache)
    connector = FileConnector(args.store) if args.store else None
    record = run_alp_from_table(
        table, scenario, alp, connector=connector, source_id=source_id
    )
    if record.status != "completed":
        print(f"run failed: {record.failure_reason}", file=sys.stderr)
        return 1
    final = record.iterations[-1]
    print(
        f"final accuracy {final['accuracy']:.4f} | "
        f"AUBC {aubc(record_curve(record)):.4f} | "
        f"{len(record.iterations)} iterations"
    )
    return 0


def cmd_grid(args):
    grid = parse_grid_file(Path(args.grid).read_text(), args.time_cap)
    # store paths are keyed by dataset id, not by the raw reference token
    tokens = {_dataset_id(tok): tok for tok in grid.datasets}
    if len(tokens) != len(grid.datasets):
        print("grid: dataset references resolve to duplicate ids",
              file=sys.stderr)
        return 2
    grid = GridSpec(
        datasets=tuple(tokens),
        settings=grid.settings,
        learners=grid.learners,
        strategies=grid.strategies,
        seeds=grid.seeds,
    )
    cache = _cache_dir(args.cache)
    store_root = Path(args.store)
    tables = {}
    tables_lock = threading.Lock()
    failures = []
    progress_lock = threading.Lock()

    def get_table(token):
        with tables_lock:
            if token not in tables:
                tables[token] = _load_table(token, cache)
            return tables[token]

    def worker():
        while True:
            cell = expand_and_claim(grid, store_root, args.lease)
            if cell is None:
                return
            try:
                table, source_id = get_table(tokens[cell.dataset])
                scenario = Scenario(
                    dataset_ref=str(cell.dataset),
                    setting=cell.setting,
                    split_seed=cell.seed,
                    pipeline_seed=cell.seed,
                )
                alp = AlpSpec(learner=cell.learner, strategy=cell.strategy)
                record = run_alp_from_table(
                    table, scenario, alp,
                    connector=FileConnector(store_root), source_id=source_id,
                )
                with progress_lock:
                    print(
                        f"done {cell.dataset}/{cell.setting}/{cell.learner.kind}/"
                        f"{cell.strategy}/seed{cell.seed} [{record.status}]"
                    )
                if record.status != "completed":
                    failures.append(cell)
            except Exception as exc:
                failures.append(cell)
                with progress_lock:
                    print(f"error in {cell.key()}: {exc}", file=sys.stderr)
            finally:
                cell.release()

    threads = [threading.Thread(target=worker) for _ in range(args.workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    return 1 if failures else 0


def cmd_report(args):
    records, errors = load_runs(args.store)
    for path, msg in errors:
        print(f"corrupt record {path}: {msg}", file=sys.stderr)
    if not records:
        print("report: store holds no readable run records", file=sys.stderr)
        return 2
    written = render_report(
        records, args.output, metric=args.metric, classes=args.classes
    )
    print(f"wrote {len(written)} report files to {args.output}")
    return 0


def cmd_selftest(args):
    """Quick internal sanity checks; a cheap subset of the acceptance suite."""
    from alpipe.core import resolve_setting
    from alpipe.evaluation import student_t_cdf, welch_t_test
    from alpipe.qs import bald_score, entropy_score, margin_score
    from alpipe.rng import derive_stream

    checks = []

    s = resolve_setting("small", 2)
    checks.append(("settings table small row",
                   (s.initial_labeled, s.total_budget, s.batch_size) == (30, 200, 10)))
    checks.append(("entropy of uniform == ln C",
                   all(abs(entropy_score(np.full(c, 1.0 / c)) - math.log(c)) < 1e-12
                       for c in range(2, 51))))
    checks.append(("margin of one-hot == 1",
                   margin_score(np.eye(4)[0]) == 1.0))
    checks.append(("BALD of identical members == 0",
                   abs(bald_score([[0.3, 0.7], [0.3, 0.7]])) < 1e-12))
    checks.append(("t CDF(0) == 0.5", student_t_cdf(0.0, 7.0) == 0.5))
    checks.append(("welch identical samples -> p == 1",
                   welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]).p == 1.0))
    a = derive_stream(1, "split", 0).uniform(100)
    b = derive_stream(1, "split", 0).uniform(100)
    checks.append(("rng streams reproducible", bool(np.all(a == b))))

    failed = 0
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}: {name}")
        failed += 0 if ok else 1
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="alpipe",
        description="Active-learning pipeline engine and benchmark harness",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("fetch", help="download and cache OpenML datasets")
    p.add_argument("ids", nargs="*", help="OpenML dataset ids (or file paths)")
    p.add_argument("--cache", default=None)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("run", help="execute one ALP run")
    p.add_argument("--dataset", help="OpenML id or .arff/.csv path")
    p.add_argument("--setting", default="small-dynamic")
    p.add_argument("--learner", default="random_forest",
                   help="kind or kind:key=value;key=value")
    p.add_argument("--qs", default="margin")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--pipeline-seed", type=int, default=0)
    p.add_argument("--config", help="scenario file overriding the flags above")
    p.add_argument("--store", default=None)
    p.add_argument("--cache", default=None)
    p.add_argument("--time-cap", type=float, default=180.0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid", help="run a cross-product experiment grid")
    p.add_argument("--grid", required=True, help="grid configuration file")
    p.add_argument("--store", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache", default=None)
    p.add_argument("--time-cap", type=float, default=180.0)
    p.add_argument("--lease", type=float, default=3600.0,
                   help="claim lease in seconds before a cell is reclaimable")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("report", help="render evaluation artifacts from a store")
    p.add_argument("--store", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--classes", choices=("all", "binary", "multiclass"),
                   default="all")
    p.add_argument("--metric", choices=("aubc", "final_accuracy"), default="aubc")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("selftest", help="run quick internal sanity checks")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    _echo_config(args)
    try:
        return args.func(args)
    except AlpipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
