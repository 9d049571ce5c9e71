"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error. An optional
``--config FILE`` of ``key=value`` lines supplies defaults; flags given on
the command line win.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from typing import Sequence

from trajaug.balancing import balance_dataset
from trajaug.core import RandomnessSpec
from trajaug.errors import DataError
from trajaug.evaluation import (
    ExperimentConfig,
    KNNClassifier,
    pi_seeds,
    run_experiment,
    write_results_csv,
)
from trajaug.io import load_csv, write_dataset
from trajaug.kinematics import dataset_features, write_features_csv
from trajaug.modification import Drop, InCircle, OnCircle, Stretch, StretchMode, augment_dataset
from trajaug.selection import (
    FewestSelection,
    ProportionalSelection,
    RandomSelection,
    RepresentativeSelection,
    select,
    selection_stream,
)

log = logging.getLogger("trajaug")

# representative selection above this share triggers a warning
REPRESENTATIVE_WARN_SHARE = 0.9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def read_config(path: str) -> dict[str, str]:
    """``key=value`` per line; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="point-based trajectory CSV")
    p.add_argument("-o", "--output", default="-", help="output path (default: stdout)")
    p.add_argument("--label-column", default=None)
    p.add_argument("--config", default=None, help="key=value defaults file")


def _add_selection(p: argparse.ArgumentParser, flag: str) -> None:
    p.add_argument(flag, dest="select_strategy", default="random",
                   choices=["random", "proportional", "fewest", "representative"])
    p.add_argument("--proportion", type=float, default=0.2)
    p.add_argument("--cutoff", type=float, default=0.6)
    p.add_argument("--tolerance", type=float, default=0.5)


def _add_modification(p: argparse.ArgumentParser, required: bool) -> None:
    if required:
        p.add_argument("--modify", required=True, choices=["on-circle", "in-circle", "stretch", "drop"])
    p.add_argument("--max-stretch", type=float, default=20.0)
    p.add_argument("--bearing", type=float, default=0.0)
    p.add_argument("--stretch-mode", default="random-in-range", choices=[m.value for m in StretchMode])
    p.add_argument("--drop-prob", type=float, default=0.2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trajaug", description="Trajectory data augmentation toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("features", help="emit segment-feature CSV")
    _add_common(p)

    p = sub.add_parser("select", help="emit augmentation candidate ids")
    _add_common(p)
    _add_selection(p, "--strategy")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("augment", help="select candidates and add synthetic copies")
    _add_common(p)
    _add_selection(p, "--select-strategy")
    _add_modification(p, required=True)
    p.add_argument("--copies", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("balance", help="augment every class up to a common size")
    _add_common(p)
    _add_modification(p, required=True)
    p.add_argument("--multiplier", type=float, default=1.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("evaluate", help="run the seeded strategy grid and emit results CSV")
    _add_common(p)
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=int, default=20, help="use the first N pi-digit seeds")
    seeds.add_argument("--seed-list", default=None, help="comma-separated explicit seeds")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--copies", type=int, default=3)
    p.add_argument("--proportion", type=float, default=0.2)
    p.add_argument("--cutoff", type=float, default=0.6)
    p.add_argument("--tolerance", type=float, default=0.5)
    _add_modification(p, required=False)
    p.add_argument("--multiplier", type=float, default=1.1)
    p.add_argument("--k", type=int, default=5, help="neighbours for the baseline k-NN model")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        values = read_config(known.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    used = set()
    for sp in subparsers.choices.values():
        # keys may name either the long flag or the destination
        names = {}
        for a in sp._actions:
            names[a.dest] = a.dest
            for opt in a.option_strings:
                if opt.startswith("--"):
                    names[opt[2:].replace("-", "_")] = a.dest
        mine = {names[k]: v for k, v in values.items() if k in names}
        for a in sp._actions:
            if a.choices and a.dest in mine and mine[a.dest] not in a.choices:
                raise UsageError(f"config: invalid value {mine[a.dest]!r} for {a.dest}")
            if a.required and a.dest in mine:
                a.required = False
        used.update(k for k in values if k in names)
        sp.set_defaults(**mine)
    unknown = set(values) - used
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")


def _selection(args):
    name = args.select_strategy
    if name == "random":
        return RandomSelection(args.proportion)
    if name == "proportional":
        return ProportionalSelection(args.proportion)
    if name == "fewest":
        return FewestSelection(args.proportion)
    return RepresentativeSelection(args.cutoff, args.tolerance)


def _modification(args):
    return {
        "on-circle": OnCircle,
        "in-circle": InCircle,
        "stretch": lambda: Stretch(StretchMode(args.stretch_mode), args.max_stretch, args.bearing),
        "drop": lambda: Drop(args.drop_prob),
    }[args.modify]()


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _candidates(ds, args):
    strategy = _selection(args)
    cands = select(ds, strategy, selection_stream(RandomnessSpec(args.seed), args.select_strategy))
    if isinstance(strategy, RepresentativeSelection) and len(ds):
        if len(cands) > REPRESENTATIVE_WARN_SHARE * len(ds):
            log.warning(
                "representative selection picked %d of %d trajectories; consider a smaller tolerance",
                len(cands), len(ds),
            )
    return cands


def _run(args) -> None:
    ds = load_csv(args.input, args.label_column)
    if args.command == "features":
        with _open_out(args.output) as out:
            write_features_csv(dataset_features(ds), out, ds.label_column)
    elif args.command == "select":
        cands = _candidates(ds, args)
        with _open_out(args.output) as out:
            cands.write(out)
    elif args.command == "augment":
        cands = _candidates(ds, args)
        result = augment_dataset(ds, cands, _modification(args), args.copies,
                                 RandomnessSpec(args.seed), workers=args.workers)
        with _open_out(args.output) as out:
            write_dataset(result, out)
    elif args.command == "balance":
        result = balance_dataset(ds, args.multiplier, _modification(args),
                                 RandomnessSpec(args.seed), workers=args.workers)
        with _open_out(args.output) as out:
            write_dataset(result, out)
    elif args.command == "evaluate":
        if args.seed_list:
            try:
                seeds = tuple(int(s) for s in args.seed_list.split(",") if s.strip())
            except ValueError:
                raise UsageError(f"bad --seed-list {args.seed_list!r}") from None
        else:
            seeds = tuple(pi_seeds(args.seeds))
        cfg = ExperimentConfig(
            seeds=seeds,
            test_fraction=args.test_fraction,
            copies=args.copies,
            proportion=args.proportion,
            cutoff=args.cutoff,
            tolerance=args.tolerance,
            max_stretch=args.max_stretch,
            bearing=args.bearing,
            stretch_mode=StretchMode(args.stretch_mode),
            drop_probability=args.drop_prob,
            multiplier=args.multiplier,
            label_column=args.label_column,
            models=(KNNClassifier(args.k),),
        )
        rows = run_experiment(ds, cfg, workers=args.workers)
        with _open_out(args.output) as out:
            write_results_csv(rows, out)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        _run(args)
    except UsageError as exc:
        print(f"trajaug: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # parameter out of range, e.g. --proportion 0
        print(f"trajaug: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"trajaug: data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
