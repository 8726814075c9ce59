"""Command-line front end: mine, bench, validate.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from . import __version__
from .bench import SyntheticConfig, run_benchmark
from .mining import (
    ConfigError,
    InternalInvariantError,
    load_run_config,
    run_mining,
)
from .patterns import DataError, enumerate_patterns, ingest_csv, validate_disjointness

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for data
    # errors, so remap to 1.
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message) from None


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spurmine", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    mine = sub.add_parser("mine", help="run the mining pipeline and write reports")
    mine.add_argument("--config", required=True, help="mining config file (YAML)")
    mine.add_argument("--out", help="output directory (defaults to the config's output field)")
    mine.add_argument(
        "--drop-unmappable",
        action="store_true",
        help="skip rows with unmappable cells instead of aborting",
    )

    bench = sub.add_parser("bench", help="run the synthetic calibration benchmark")
    bench.add_argument("--config", required=True, help="benchmark config file (YAML)")
    bench.add_argument("--out", required=True, help="output directory")
    bench.add_argument("--runs", type=int, help="override the configured number of runs")
    bench.add_argument("--seed", type=int, help="override the configured master seed")

    validate = sub.add_parser("validate", help="check data against the schema and disjointness")
    validate.add_argument("--config", required=True, help="mining config file (YAML)")
    validate.add_argument("--drop-unmappable", action="store_true")
    return parser


def load_bench_config(path: str) -> SyntheticConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{path}: expected a mapping of benchmark fields")
    allowed = {f.name for f in fields(SyntheticConfig)}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    try:
        return SyntheticConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_mine(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    out_dir = args.out or config.output
    if out_dir is None:
        raise ConfigError("no output directory: set --out or the config's output field")
    report = run_mining(config, drop_unmappable=args.drop_unmappable)
    _write(Path(out_dir) / "report.json", report.to_json() + "\n")
    _write(Path(out_dir) / "patterns.tsv", report.patterns_tsv())
    print(f"dataset: {report.dataset['n_rows']} rows, "
          f"{report.dataset['n_positive']} positive, "
          f"{report.dataset['n_patterns']} patterns, "
          f"{report.dataset['n_testable_at_sigma1']} testable")
    for method in config.methods:
        block = report.methods[method]
        print(f"{method}: {block['n_rejected']} rejected, "
              f"{len(block['dominating_subset'])} on the utility front")
    print(f"wrote {Path(out_dir) / 'report.json'} and {Path(out_dir) / 'patterns.tsv'}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_bench_config(args.config)
    overrides: dict[str, Any] = {}
    if args.runs is not None:
        overrides["n_runs"] = args.runs
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        try:
            config = replace(config, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    report = run_benchmark(config)
    _write(Path(args.out) / "bench.json", report.to_json() + "\n")
    _write(Path(args.out) / "bench.tsv", report.to_tsv())
    print(f"setting={config.setting} runs={report.n_runs} alpha={config.alpha}")
    print(f"{'method':<20} {'fwer':>8} {'avg_rejections':>15}")
    for method, fwer in report.fwer.items():
        print(f"{method:<20} {fwer:>8.4f} {report.avg_rejections[method]:>15.3f}")
    if report.dominance_check_violations:
        raise InternalInvariantError(
            f"{report.dominance_check_violations} runs violated the dominance containment"
        )
    print(f"wrote {Path(args.out) / 'bench.json'} and {Path(args.out) / 'bench.tsv'}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    table = ingest_csv(config.input, config.schema, drop_unmappable=args.drop_unmappable)
    patterns = enumerate_patterns(table, config.schema, config.min_support)
    report = validate_disjointness([p for p, _ in patterns], config.schema)
    if not report.ok:
        print(f"disjointness violation: {report.message}", file=sys.stderr)
        return EXIT_DATA
    print(
        f"ok: {table.n_rows} rows ({len(table.dropped_rows)} dropped), "
        f"{len(patterns)} disjoint patterns over {len(config.schema.variables)} variables"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --version and --help raise SystemExit(0); usage errors carry text.
        if exc.code in (0, None):
            return EXIT_OK
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_USAGE
        return EXIT_USAGE

    handlers = {"mine": cmd_mine, "bench": cmd_bench, "validate": cmd_validate}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
