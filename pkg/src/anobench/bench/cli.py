"""Command-line entry point: ``anobench {run,synth,corrupt,cd}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from ..corruptions import (
    MAX_DUPLICATION,
    MAX_FLIP_RATIO,
    MAX_NOISE_RATIO,
    add_irrelevant_features,
    duplicate_anomalies,
    flip_labels,
)
from ..errors import AnobenchError, ConfigError, DataError
from ..evaluation.splits import stratified_split
from ..synthgen import ANOMALY_TYPES, DEFAULT_ALPHA, SynthParams, assemble_synthetic
from .config import THREADS_ENV, load_config
from .grid import emit_results, run_grid
from .io import load_csv, read_results, write_dataset_csv
from .report import render_cd

log = logging.getLogger("anobench")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an unsigned integer seed, got {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed out of range: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anobench", description="Anomaly-detection benchmarking toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run a benchmark grid from a YAML config")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=_positive_int,
                   help=f"worker processes (default: config, then ${THREADS_ENV}, then 1)")
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out", help="output directory (default: config out_dir)")
    p.add_argument("--no-cd", action="store_true", help="skip the per-setting CD diagrams")

    p = sub.add_parser("synth", help="replace a dataset's anomalies by synthetic ones")
    p.add_argument("--input", required=True)
    p.add_argument("--type", required=True, choices=ANOMALY_TYPES)
    p.add_argument("--alpha", type=float, help="type-specific default: " +
                   ", ".join(f"{t}={a:g}" for t, a in DEFAULT_ALPHA.items()))
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("corrupt", help="split 70/30 and corrupt; writes <out>_train.csv and <out>_test.csv")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", required=True, choices=("duplicate", "irrelevant", "flip"))
    p.add_argument("--level", required=True, type=float)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cd", help="critical-difference diagram from a results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--metric", choices=("aucroc", "aucpr"), default="aucroc")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--setting", help="setting to compare (required if results hold several)")
    p.add_argument("--out", required=True)
    return parser


def _safe_name(setting: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.=-]", "_", setting)


def cmd_run(args) -> int:
    config = load_config(args.config)
    config = config.with_overrides(threads=args.threads, seed=args.seed, out_dir=args.out)
    table = run_grid(config)
    out = Path(config.out_dir)
    if not out.is_absolute() and args.out is None:
        out = config.base_dir / out
    paths = emit_results(table, out)
    if not args.no_cd:
        for setting in dict.fromkeys(r.setting for r in table.records):
            records = [r for r in table.records if r.setting == setting]
            try:
                render_cd(records, "aucroc", 0.05, out / f"cd_{_safe_name(setting)}.svg")
            except (DataError, ValueError) as exc:
                log.info("no CD diagram for %s: %s", setting, exc)
    print(f"{len(table.records)} records, {len(table.skipped)} skipped, "
          f"{len(table.errors)} errors -> {paths['results'].parent}")
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.alpha is not None and not args.alpha > 0:
        raise UsageError(f"--alpha must be positive, got {args.alpha}")
    X, y, names = load_csv(args.input)
    Xs, ys = assemble_synthetic(X, y, SynthParams(args.type, alpha=args.alpha, seed=args.seed))
    write_dataset_csv(args.out, Xs, ys, names)
    alpha = DEFAULT_ALPHA[args.type] if args.alpha is None else args.alpha
    print(f"wrote {len(ys)} rows ({int(ys.sum())} {args.type} anomalies, alpha={alpha:g}) to {args.out}")
    return EXIT_OK


def _check_level(mode, level):
    if mode == "duplicate":
        if level != int(level) or not 1 <= level <= MAX_DUPLICATION:
            raise UsageError(f"--level: duplication factor must be an integer in 1..{MAX_DUPLICATION}, got {level:g}")
    else:
        cap = MAX_NOISE_RATIO if mode == "irrelevant" else MAX_FLIP_RATIO
        if not 0.0 <= level <= cap:
            raise UsageError(f"--level: {mode} ratio must be in [0, {cap}], got {level:g}")


def cmd_corrupt(args) -> int:
    _check_level(args.mode, args.level)
    X, y, names = load_csv(args.input)
    split = stratified_split(X, y, 0.7, args.seed)
    if args.mode == "duplicate":
        split = duplicate_anomalies(split, int(args.level), args.seed)
    elif args.mode == "irrelevant":
        split = add_irrelevant_features(split, args.level, args.seed)
        names = names + [f"noise{j}" for j in range(split.n_features - len(names))]
    else:
        split = flip_labels(split, args.level, args.seed)
    out = Path(args.out)
    stem = out.with_suffix("") if out.suffix == ".csv" else out
    train, test = Path(f"{stem}_train.csv"), Path(f"{stem}_test.csv")
    write_dataset_csv(train, split.X_train, split.y_train, names)
    write_dataset_csv(test, split.X_test, split.y_test, names)
    print(f"wrote {train} ({len(split.y_train)} rows) and {test} ({len(split.y_test)} rows)")
    return EXIT_OK


def cmd_cd(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise UsageError(f"--alpha must be in (0, 1), got {args.alpha}")
    records = read_results(args.results)
    svg, txt = render_cd(records, args.metric, args.alpha, args.out, setting=args.setting)
    print(f"wrote {svg} and {txt}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "synth": cmd_synth, "corrupt": cmd_corrupt, "cd": cmd_cd}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"anobench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"anobench {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"anobench {args.command}: data error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"anobench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AnobenchError as exc:
        print(f"anobench {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
