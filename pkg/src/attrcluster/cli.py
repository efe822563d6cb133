"""Command-line entry point: ``attrcluster --input data.csv --out results``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .dataset import DEFAULT_MISSING_TOKEN, ColumnKind, MissingPolicy
from .errors import AttrClusterError, ConfigError
from .factors import DEFAULT_EPSILON
from .pipeline import FORMATS, RULES, RunConfig, run_pipeline

log = logging.getLogger("attrcluster")


def _value_map(text: str) -> tuple[str, str, str]:
    # COL=from:to
    column, sep, rest = text.partition("=")
    src, sep2, dst = rest.partition(":")
    if not (sep and sep2 and column):
        raise argparse.ArgumentTypeError(f"expected COL=from:to, got {text!r}")
    return column, src, dst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="attrcluster",
        description="Cluster numeric and nominal attributes by factor analysis.",
    )
    p.add_argument("--input", required=True, type=Path, help="headed CSV file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--missing-token", default=DEFAULT_MISSING_TOKEN)
    p.add_argument(
        "--missing-policy",
        default="drop-rows",
        metavar="drop-rows|drop-cols[:T]",
        help="drop incomplete rows, or first drop columns missing more than T (default 0.2)",
    )
    p.add_argument("--numeric", action="append", default=[], metavar="COL")
    p.add_argument("--nominal", action="append", default=[], metavar="COL")
    p.add_argument(
        "--map",
        action="append",
        default=[],
        type=_value_map,
        metavar="COL=from:to",
        help="recode a value before typing (repeatable)",
    )
    rank = p.add_mutually_exclusive_group()
    rank.add_argument("--rank", dest="rank", action="store_true", help="rank non-dichotomous columns")
    rank.add_argument("--no-rank", dest="rank", action="store_false")
    p.set_defaults(rank=False)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--rule", choices=RULES, default="both")
    p.add_argument("--format", action="append", choices=FORMATS, dest="formats")
    p.add_argument("--labels", choices=("short", "full"), default="full")
    p.add_argument("--include-singletons", action="store_true")
    p.add_argument("--dump-tables", action="store_true")
    p.add_argument("--generated-at", default=None, help="timestamp recorded in the report")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {}
    for name in args.numeric:
        overrides[name] = ColumnKind.NUMERIC
    for name in args.nominal:
        if overrides.get(name) is ColumnKind.NUMERIC:
            raise ConfigError(f"column {name!r} given as both --numeric and --nominal")
        overrides[name] = ColumnKind.NOMINAL
    maps: dict[str, dict[str, str]] = {}
    for column, src, dst in args.map:
        maps.setdefault(column, {})[src] = dst
    return RunConfig(
        input=args.input,
        out=args.out,
        missing_token=args.missing_token,
        missing_policy=MissingPolicy.parse(args.missing_policy),
        kind_overrides=overrides,
        value_maps=maps,
        rank=args.rank,
        epsilon=args.epsilon,
        rule=args.rule,
        formats=tuple(dict.fromkeys(args.formats or ("dot", "json"))),
        labels=args.labels,
        dump_tables=args.dump_tables,
        include_singletons=args.include_singletons,
        delimiter=args.delimiter,
        generated_at=args.generated_at,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ConfigError.exit_code if exc.code else 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        result = run_pipeline(config_from_args(args))
    except AttrClusterError as exc:
        print(f"attrcluster: error: {exc}", file=sys.stderr)
        return exc.exit_code

    sel = result.analysis.selection
    print(
        f"factors: {sel.nof} (epsilon {sel.epsilon:g}, min variance "
        f"{100 * sel.min_var:.1f}% for {sel.min_var_attribute.get(args.labels)})"
    )
    for rule, graph in result.graphs.items():
        print(f"{rule.value}: {len(graph.clusters)} cluster(s)")
        for c in graph.clusters:
            members = ", ".join(m.attribute.get(args.labels) for m in c.members)
            print(f"  {c.factor}: {members}")
    for path in result.written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
