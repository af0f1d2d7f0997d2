"""Command-line entry point: ``qnnsim run|plot|compare|prepare-data``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .data import DataError
from .harness import (ConfigError, ExperimentConfig, RunIncompleteError, compare_runs,
                      load_config_file, parse_hidden, run_experiment)
from .metrics import MetricsFormatError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("qnnsim")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _label_column(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qnnsim", description="Simulate and benchmark the product-of-sines QNN.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="train one model and write a run directory")
    run.add_argument("--config", help="JSON file with ExperimentConfig fields")
    run.add_argument("--dataset")
    run.add_argument("--model", choices=["qnn", "nn"])
    run.add_argument("--epochs", type=int)
    run.add_argument("--lr", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--hidden", help="comma-separated widths, e.g. 10,6")
    run.add_argument("--stats-scope", choices=["whole", "train"])
    run.add_argument("--out")
    run.add_argument("--label-column", type=_label_column)
    run.add_argument("--delimiter")
    run.add_argument("--train-fraction", type=float)
    run.add_argument("--angle-range", type=float)
    run.add_argument("--init", choices=["halfpi", "uniform"])
    run.add_argument("--init-spread", type=float)
    run.add_argument("--optimizer", choices=["gd", "adam"])
    run.add_argument("--activation", choices=["sigmoid", "tanh"])
    run.add_argument("--init-scale", type=float)

    plot = sub.add_parser("plot", help="render metrics.csv as one SVG per split")
    plot.add_argument("--metrics", required=True)
    plot.add_argument("--out", required=True, help="SVG path stem or directory")

    cmp_ = sub.add_parser("compare", help="compare two completed run directories")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--csv", help="also write the table as CSV here")

    prep = sub.add_parser("prepare-data", help="write the benchmark CSVs")
    prep.add_argument("--out", required=True)
    prep.add_argument("--source", help="imbalanced-databases wheel or sdist to read from")
    return p


def config_from_args(args) -> ExperimentConfig:
    values = load_config_file(args.config) if args.config else {}
    for f in dataclasses.fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = parse_hidden(v) if f.name == "hidden" else v
    if "dataset" not in values:
        raise ConfigError("--dataset is required (on the command line or in --config)")
    return ExperimentConfig.from_dict(values)


def _run(args) -> int:
    cfg = config_from_args(args)
    out = run_experiment(cfg)
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    final = manifest["final"]
    print(f"{out}: train acc {final['train']['accuracy']:.4f}, "
          f"test acc {final['test']['accuracy']:.4f} ({manifest['wall_time_s']} s)")
    return EXIT_OK


def _plot(args) -> int:
    from .plot import emit_plot

    for path in emit_plot(args.metrics, args.out):
        print(path)
    return EXIT_OK


def _compare(args) -> int:
    table = compare_runs(args.a, args.b)
    sys.stdout.write(table.to_text())
    if args.csv:
        Path(args.csv).write_text(table.to_csv(), encoding="utf-8")
    return EXIT_OK


def _prepare(args) -> int:
    from .datasets import prepare_all

    for name, path in prepare_all(args.out, args.source).items():
        print(f"{name}: {path}")
    return EXIT_OK


COMMANDS = {"run": _run, "plot": _plot, "compare": _compare, "prepare-data": _prepare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"qnnsim: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, MetricsFormatError, FileNotFoundError, RunIncompleteError) as exc:
        print(f"qnnsim: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to an exit code
        print(f"qnnsim: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
